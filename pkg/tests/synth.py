"""Seeded generators for synthetic events and documents."""

import random

from newsrace.model import Event

FIRST = ["Ali", "Maria", "Kenji", "Olga", "Tomas", "Priya", "Jonas", "Amara"]
LAST = ["Haddad", "Silva", "Tanaka", "Petrova", "Novak", "Raman", "Berg", "Okafor"]
TEAMS = ["Mavericks", "Lakers", "Celtics", "Knicks", "Arsenal", "Chelsea", "Porto", "Benfica"]
PLACES = ["Pakistan", "Kenya", "Brazil", "Hungary", "Japan", "Peru", "Ohio", "Texas"]
ORGS = ["Supreme Court", "Federal Reserve", "Central Bank", "Senate", "Interior Ministry"]
NOUNS = ["election", "strike", "game", "vote", "earthquake", "flood", "trial", "summit", "rates"]
FILLER = "the a officials said on after in as report new week people city".split()


def event(rng: random.Random, i: int) -> Event:
    kind = rng.randrange(3)
    if kind == 0:
        a, b = rng.sample(TEAMS, 2)
        title, desc, cat = f"{a} vs. {b}", f"Will the {a} beat the {b} in {rng.choice(PLACES)}?", "sports"
        surface = "polymarket"
    elif kind == 1:
        who = f"{rng.choice(FIRST)} {rng.choice(LAST)}"
        place = rng.choice(PLACES)
        title = f"{who} {rng.choice(NOUNS)}"
        desc = f"{who} of the {rng.choice(ORGS)} leads a {rng.choice(NOUNS)} in {place}, officials said."
        cat, surface = "politics", "wcep"
    else:
        place = rng.choice(PLACES)
        noun = rng.choice(NOUNS)
        title = f"{place} {noun}"
        desc = f"A {noun} hits {place} as the {rng.choice(ORGS)} responds."
        cat, surface = "other", "wcep"
    return Event(f"syn-{i}", surface, title, desc, cat, 1_776_000_000_000 + i, 1.0, f"k{i}")


def document(rng: random.Random) -> str:
    pool = FIRST + LAST + TEAMS + PLACES + ORGS + NOUNS + FILLER * 3 + ["U.S.", "United States"]
    return " ".join(rng.choice(pool) for _ in range(rng.randrange(5, 25)))


def corpus(seed: int, n: int = 200) -> list[str]:
    rng = random.Random(seed)
    return [document(rng) for _ in range(n)]
