"""Run orchestration: config, per-event stages, resume and table output.

A run lives in ``<out_dir>/<run_id>/``. Events move through draft -> pull ->
recover -> verify independently; a failure is recorded against the event
and the run carries on. Each completed stage stores the sha256 of its output
file so a resumed run can tell intact work from stale or tampered files.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from datetime import date, timedelta
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from . import analytics as an
from .drafting import (
    BooleanQuery,
    ModelBackend,
    QueryKind,
    broaden_ladder,
    draft_booleans,
    extract_features,
    make_backend,
    parse_query,
    specificity_gate,
)
from .model import ChannelSet, Event, Mention, Surface, to_ms, to_record
from .provider import (
    BrandwatchProvider,
    MockProvider,
    Provider,
    ProviderError,
    ProviderSession,
    RateLimiter,
    SystemClock,
    VirtualClock,
    load_documents,
    projected_wall_clock_s,
    pull_window,
    requests_per_event_ceiling,
    run_query_lifecycle,
)
from .seed_polymarket import seed_polymarket
from .seed_wcep import FixturePageviews, RestPageviews, fixture_pages, live_pages, seed_wcep
from .store import (
    STAGES,
    ManifestError,
    RunDir,
    RunManifest,
    canonical_json,
    digest,
    file_digest,
    load_events,
    load_mentions,
    read_jsonl,
    save_events,
    save_mentions,
    write_jsonl,
)
from .verify import KeywordSet, backend_adjudicator, earliest_verified
from .xrecover import OembedClient, fixture_get, recover_mention, requests_get

logger = logging.getLogger(__name__)

LIVE_ENV = ("BRANDWATCH_TOKEN", "BRANDWATCH_PROJECT_ID")
REMOTE_ENV = ("NEWSRACE_LLM_API_KEY",)
TABLES = ("hits", "winners", "paired_a", "paired_b", "probe")
SAMPLE_NAMES = {Surface.WCEP: "wcep", Surface.POLYMARKET: "polymarket"}


class ConfigError(ValueError):
    pass


def default_fixtures() -> Path:
    return Path(str(resources.files("newsrace") / "data" / "fixtures"))


@dataclass
class RunConfig:
    run_id: str = "run"
    out_dir: str = "runs"
    mode: str = "mock"  # mock | live
    backend: str = "fallback"  # fallback | remote
    surfaces: tuple[str, ...] = ("wcep", "polymarket")
    fixtures: str | None = None

    wcep_from: str = "2026-04-12"
    wcep_to: str = "2026-05-11"
    wcep_top: int = 50
    wcep_cap: int = 3
    wcep_pages: str = "wcep"
    wcep_pageviews: str = "pageviews.csv"
    lexicon: str | None = None

    pm_from: str = "2026-02-13"
    pm_to: str = "2026-05-13"
    pm_floor: float = 100_000
    pm_top: int = 130
    pm_markets: str = "polymarket/markets.csv"
    pm_trades: str = "polymarket/trades.csv"

    mock_documents: str = "mentions.jsonl"
    oembed_dir: str = "oembed"

    rate_cap: int = 28
    rate_window_s: float = 600.0
    backfill_floor: float = 50.0
    backfill_cap_s: float = 90.0
    poll_s: float = 5.0
    page_size: int = 100
    max_pages: int = 1
    pre_min: float = 30.0
    post_h: float = 24.0
    specificity_threshold: float = 0.5
    extra_channels: tuple[str, ...] = ("reddit", "blog")
    probe: tuple[str, ...] = ()
    probe_levels: int = 5
    parallelism: int = 4

    # --- construction -----------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict[str, Any], base: Path | None = None) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        for key in ("surfaces", "extra_channels", "probe"):
            if key in data and data[key] is not None:
                v = data[key]
                data[key] = tuple([v] if isinstance(v, str) else v)
        for key in ("wcep_from", "wcep_to", "pm_from", "pm_to"):
            if isinstance(data.get(key), date):
                data[key] = data[key].isoformat()
        if base is not None and data.get("fixtures") and not Path(data["fixtures"]).is_absolute():
            data["fixtures"] = str((base / data["fixtures"]).resolve())
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: Path | str, overrides: dict[str, Any] | None = None) -> RunConfig:
        path = Path(path)
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a mapping")
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(data, base=path.parent)

    def replace(self, **changes: Any) -> RunConfig:
        data = self.snapshot()
        data.update({k: v for k, v in changes.items() if v is not None})
        return RunConfig.from_dict(data)

    def validate(self) -> None:
        if self.mode not in ("mock", "live"):
            raise ConfigError(f"mode must be mock or live, not {self.mode!r}")
        if self.backend not in ("fallback", "remote"):
            raise ConfigError(f"backend must be fallback or remote, not {self.backend!r}")
        for s in self.surfaces:
            if s not in ("wcep", "polymarket"):
                raise ConfigError(f"unknown surface {s!r}")
        positive = ("wcep_top", "wcep_cap", "pm_floor", "pm_top", "rate_cap", "rate_window_s",
                    "backfill_cap_s", "poll_s", "page_size", "max_pages", "post_h",
                    "probe_levels", "parallelism")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.pre_min < 0 or not 0 <= self.backfill_floor <= 100:
            raise ConfigError("pre_min must be >= 0 and backfill_floor within [0, 100]")
        if not 0 <= self.specificity_threshold <= 1:
            raise ConfigError("specificity_threshold must lie in [0, 1]")
        for a, b in ((self.wcep_from, self.wcep_to), (self.pm_from, self.pm_to)):
            date.fromisoformat(a), date.fromisoformat(b)
        ChannelSet(self.extra_channels)

    def check_environment(self, env: dict[str, str] | None = None) -> None:
        env = os.environ if env is None else env
        needed = (LIVE_ENV if self.mode == "live" else ()) + (REMOTE_ENV if self.backend == "remote" else ())
        missing = [k for k in needed if not env.get(k)]
        if missing:
            raise ConfigError(f"missing environment variables: {', '.join(missing)}")

    def snapshot(self) -> dict[str, Any]:
        data = asdict(self)
        for key in ("surfaces", "extra_channels", "probe"):
            data[key] = list(data[key])
        return data

    def hash(self) -> str:
        data = self.snapshot()
        data.pop("run_id")
        data.pop("out_dir")
        return digest(canonical_json(data))

    # --- derived -----------------------------------------------------------

    def fixture_path(self, rel: str) -> Path:
        p = Path(rel)
        if p.is_absolute():
            return p
        return Path(self.fixtures) / p if self.fixtures else default_fixtures() / p

    @property
    def wcep_window(self) -> tuple[date, date]:
        return date.fromisoformat(self.wcep_from), date.fromisoformat(self.wcep_to)

    @property
    def pm_window(self) -> tuple[int, int]:
        start = date.fromisoformat(self.pm_from)
        end = date.fromisoformat(self.pm_to) + timedelta(days=1)
        return to_ms(start), to_ms(end) - 1


@dataclass
class BudgetProjection:
    events: int
    per_event: int
    requests: int
    wall_clock_s: float

    @property
    def hours(self) -> float:
        return self.wall_clock_s / 3600


def project_budget(n_events: int, cfg: RunConfig | None = None, probe_levels: int = 0) -> BudgetProjection:
    """Request ceiling for a live run and the wall clock the limiter imposes on it."""
    cfg = cfg or RunConfig()
    per = requests_per_event_ceiling(cfg.backfill_cap_s, cfg.poll_s, pulls=2 * cfg.max_pages)
    total = per * (n_events + probe_levels)
    return BudgetProjection(n_events, per, total, projected_wall_clock_s(total, cfg.rate_cap, cfg.rate_window_s))


@dataclass
class RunOutcome:
    manifest: RunManifest
    failures: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 2 if self.failures else 0


def _read_record(path: Path) -> dict:
    recs = list(read_jsonl(path))
    if len(recs) != 1:
        raise ValueError(f"{path}: expected one record")
    return recs[0]


class Pipeline:
    """One run. Collaborators can be injected; otherwise they follow ``config.mode``."""

    def __init__(self, config: RunConfig, *, provider: Provider | None = None,
                 backend: ModelBackend | None = None, oembed: OembedClient | None = None,
                 clock=None, resume_only: bool = False, env: dict[str, str] | None = None):
        config.validate()
        self.config = config
        self.run = RunDir(config.out_dir, config.run_id)
        if config.mode == "live" and provider is None:
            config.check_environment(env)
        elif config.backend == "remote" and backend is None:
            config.check_environment(env)
        self.clock = clock or (VirtualClock() if config.mode == "mock" else SystemClock())
        self.manifest = self._open_manifest(resume_only)
        self._provider = provider
        self._backend = backend
        self._oembed = oembed
        self.limiter = RateLimiter(config.rate_cap, config.rate_window_s, clock=self.clock)
        self._session: ProviderSession | None = None
        self.channels = ChannelSet(config.extra_channels)
        self._requests_base = self.manifest.data.get("request_count", 0)

    def _save(self) -> None:
        self.manifest.data["request_count"] = self._requests_base + self.limiter.granted
        self.manifest.save()

    def _open_manifest(self, resume_only: bool) -> RunManifest:
        path = self.run.manifest
        if path.exists():
            m = RunManifest.load(path)
            if m.data["config_hash"] != self.config.hash():
                raise ManifestError(
                    f"run {self.config.run_id} was created with a different configuration; "
                    "start a new run id instead")
            return m
        if resume_only:
            raise ManifestError(f"no manifest at {path}")
        return RunManifest.create(path, self.config.run_id, self.config.snapshot(), self.config.hash())

    # --- collaborators ------------------------------------------------------

    @property
    def backend(self) -> ModelBackend:
        if self._backend is None:
            self._backend = make_backend(self.config.backend)
        return self._backend

    @property
    def provider(self) -> Provider:
        if self._provider is None:
            if self.config.mode == "mock":
                docs = load_documents(self.config.fixture_path(self.config.mock_documents))
                self._provider = MockProvider(docs, clock=self.clock)
            else:
                self._provider = BrandwatchProvider()
        return self._provider

    @property
    def session(self) -> ProviderSession:
        if self._session is None:
            self._session = ProviderSession(self.provider, self.limiter, self.clock)
        return self._session

    @property
    def oembed(self) -> OembedClient:
        if self._oembed is None:
            get = (fixture_get(self.config.fixture_path(self.config.oembed_dir))
                   if self.config.mode == "mock" else requests_get())
            self._oembed = OembedClient(get, cache_dir=self.run.oembed_cache,
                                        clock=self.clock.now, sleep=self.clock.sleep)
        return self._oembed

    # --- seeding ---------------------------------------------------------------

    def seed(self) -> list[Event]:
        m = self.manifest
        if m.run_stage_done("seed") and self.run.events.exists():
            if file_digest(self.run.events) == m.data["run_stages"]["seed"]["checksum"]:
                return load_events(self.run.events)
            m.add_warning(None, "events file changed since seeding; reseeding")
        cfg = self.config
        events: list[Event] = []
        stats: dict[str, Any] = {}
        if "wcep" in cfg.surfaces:
            if cfg.mode == "mock":
                pages = fixture_pages(cfg.fixture_path(cfg.wcep_pages))
                views = FixturePageviews(cfg.fixture_path(cfg.wcep_pageviews))
            else:
                pages, views = live_pages(), RestPageviews()
            lexicon = None
            if cfg.lexicon:
                from .lexicons import us_lexicon

                lexicon = us_lexicon(str(cfg.fixture_path(cfg.lexicon)))
            rep = seed_wcep(cfg.wcep_window, pages, views, cfg.wcep_top, cfg.wcep_cap,
                            cfg.parallelism, lexicon)
            for err in rep.errors:
                m.add_warning(None, f"wcep parse: {err}")
            for w in rep.warnings:
                m.add_warning(None, f"wcep: {w}")
            stats["wcep"] = {"candidates": rep.candidates, "passed_filter": rep.passed_filter,
                             "events": len(rep.events), "distinct_articles": rep.distinct_articles,
                             "shortfall": rep.shortfall}
            events += rep.events
        if "polymarket" in cfg.surfaces:
            rep = seed_polymarket(cfg.fixture_path(cfg.pm_markets), cfg.fixture_path(cfg.pm_trades),
                                  cfg.pm_window, cfg.pm_floor, cfg.pm_top)
            stats["polymarket"] = {"filtered": len(rep.filtered), "dropped_no_trades": len(rep.pinned.dropped),
                                   "events": len(rep.events), "distinct_groups": rep.distinct_groups}
            events += rep.events
        checksum = save_events(self.run.events, events)
        for e in events:
            m.event(e.event_id)
        m.mark_run_stage("seed", checksum, **stats)
        m.save()
        return events

    # --- per-event stages --------------------------------------------------------

    def _stage_intact(self, event_id: str, stage: str) -> bool:
        m = self.manifest
        if not m.stage_done(event_id, stage):
            return False
        path = self.run.stage_file(stage, event_id)
        want = m.event(event_id)["stages"][stage].get("checksum")
        if not path.exists() or file_digest(path) != want:
            m.add_warning(event_id, f"{stage} output missing or changed; redoing from {stage}")
            m.invalidate_from(event_id, stage)
            return False
        return True

    def _fail(self, event: Event, stage: str, status: str, exc: Exception) -> None:
        self.manifest.add_error(event.event_id, f"{stage}: {exc}")
        self.manifest.set_status(event.event_id, status)
        self.manifest.event(event.event_id)["stages"][stage] = {"status": "failed", "error": str(exc)}

    def draft(self, event: Event) -> dict:
        warn = lambda msg: self.manifest.add_warning(event.event_id, msg)  # noqa: E731
        features = extract_features(event, self.backend, warn)
        cfg = self.config
        redrafted = False
        news, x = draft_booleans(event, self.backend, warn)
        scores = [specificity_gate(q, self.backend, cfg.specificity_threshold, event) for q in (news, x)]
        if not all(s.approved for s in scores):
            redrafted = True
            news, x = draft_booleans(event, self.backend, warn)
            scores = [specificity_gate(q, self.backend, cfg.specificity_threshold, event) for q in (news, x)]
        approved = all(s.approved for s in scores)
        rec = {
            "event_id": event.event_id,
            "features": to_record(features),
            "news": news.render(),
            "x": x.render(),
            "specificity": {"news": scores[0].value, "x": scores[1].value},
            "approved": approved,
            "redrafted": redrafted,
        }
        checksum = write_jsonl(self.run.stage_file("draft", event.event_id), [rec])
        self.manifest.mark_stage(event.event_id, "draft", checksum, approved=approved)
        if not approved:
            self.manifest.set_status(event.event_id, "manual_review")
        return rec

    def _queries(self, event_id: str) -> tuple[BooleanQuery, BooleanQuery, dict]:
        rec = _read_record(self.run.stage_file("draft", event_id))
        return (parse_query(rec["news"], QueryKind.NEWS_TIGHT),
                parse_query(rec["x"], QueryKind.X_PERMISSIVE), rec)

    def pull(self, event: Event) -> list[Mention]:
        _, x, _ = self._queries(event.event_id)
        cfg = self.config
        rec = self.manifest.event(event.event_id)
        existing = rec.get("query_id") if not rec.get("query_deleted") else None

        def on_created(q):
            rec["query_id"] = q.provider_query_id
            rec["query_deleted"] = False
            self.manifest.save()

        result = run_query_lifecycle(
            self.session, event.event_id, x, pull_window(event.t_e, cfg.pre_min, cfg.post_h),
            existing_id=existing, floor_percent=cfg.backfill_floor, cap_seconds=cfg.backfill_cap_s,
            poll_interval=cfg.poll_s, page_size=cfg.page_size, max_pages=cfg.max_pages,
            on_created=on_created)
        merged: dict[tuple[str, str], Mention] = {}
        for mention in result.all_mentions + result.x_mentions:
            if mention.channel not in self.channels:
                continue
            merged.setdefault((mention.channel, mention.guid), mention)
        mentions = list(merged.values())
        counts: dict[str, int] = {}
        for mention in mentions:
            counts[mention.channel] = counts.get(mention.channel, 0) + 1
        rec["query_deleted"] = result.deleted
        rec["backfill_percent"] = result.query.backfill_percent
        rec["pull_counts"] = dict(sorted(counts.items()))
        checksum = save_mentions(self.run.stage_file("pull", event.event_id), mentions)
        self.manifest.mark_stage(event.event_id, "pull", checksum, requests=result.requests)
        return mentions

    def recover(self, event: Event) -> list[Mention]:
        pulled = load_mentions(self.run.stage_file("pull", event.event_id))
        recovered = [recover_mention(m, self.oembed) for m in pulled]
        checksum = save_mentions(self.run.stage_file("recover", event.event_id), recovered)
        missing = sum(1 for m in recovered if m.channel == "twitter" and not m.body)
        self.manifest.mark_stage(event.event_id, "recover", checksum, oembed_missing=missing)
        return recovered

    def verify(self, event: Event) -> list[an.ChannelEarliest]:
        news, x, _ = self._queries(event.event_id)
        mentions = load_mentions(self.run.stage_file("recover", event.event_id))
        by_channel: dict[str, list[Mention]] = {}
        for mention in mentions:
            by_channel.setdefault(mention.channel, []).append(mention)
        transcript: list[dict] = []
        checked: dict[str, list[Mention]] = {}
        earliest = earliest_verified(event, by_channel, KeywordSet.from_queries(news, x),
                                     backend_adjudicator(self.backend, event),
                                     transcript=transcript, verified_out=checked)
        statuses = {(m.channel, m.guid): m for ms in checked.values() for m in ms}
        out = [statuses.get((m.channel, m.guid), m) for m in mentions]
        write_jsonl(self.run.stage_file("adjudicate", event.event_id), transcript)
        checksum = save_mentions(self.run.stage_file("verify", event.event_id), out)
        rec = self.manifest.event(event.event_id)
        rec["verification"] = {
            c.channel: {"guid": c.mention.guid, "ts": c.ts, "fallback_depth": c.fallback_depth}
            for c in earliest
        }
        self.manifest.mark_stage(event.event_id, "verify", checksum)
        self.manifest.set_status(event.event_id, "hit" if earliest else "zero_hit")
        return earliest

    def process_event(self, event: Event, until: str = "verify") -> str | None:
        """Run the outstanding stages for one event; returns a failure note or None."""
        m = self.manifest
        for stage in STAGES[: STAGES.index(until) + 1]:
            if self._stage_intact(event.event_id, stage):
                continue
            if stage != "draft":
                prior = m.event(event.event_id)["stages"].get("draft", {})
                if not prior.get("approved", False):
                    m.set_status(event.event_id, "manual_review")
                    return f"{event.event_id}: queries held for manual review"
            try:
                getattr(self, stage)(event)
            except ProviderError as exc:
                status = "failed_drafting" if stage == "pull" and 400 <= exc.status < 500 else f"failed_{stage}"
                self._fail(event, stage, status, exc)
                return f"{event.event_id}: {stage}: {exc}"
            except Exception as exc:
                logger.exception("%s failed at %s", event.event_id, stage)
                self._fail(event, stage, f"failed_{stage}", exc)
                return f"{event.event_id}: {stage}: {exc}"
            finally:
                self._save()
        return None

    # --- run-level stages -------------------------------------------------------------

    def _verify_inputs_digest(self, events: list[Event]) -> str:
        parts = []
        for e in events:
            st = self.manifest.event(e.event_id)["stages"].get("verify", {})
            parts.append(f"{e.event_id}:{st.get('status')}:{st.get('checksum')}")
        return digest("\n".join(parts))

    def earliest_map(self, events: list[Event]) -> dict[str, list[an.ChannelEarliest]]:
        out = {}
        for e in events:
            path = self.run.stage_file("verify", e.event_id)
            if self.manifest.stage_done(e.event_id, "verify") and path.exists():
                out[e.event_id] = an.earliest_from_store(e.event_id, load_mentions(path))
            else:
                out[e.event_id] = []
        return out

    def probe(self, events: list[Event]) -> dict[str, list[an.ProbeLevel]]:
        targets = select_probe_events(events, self.config.probe)
        key = digest(canonical_json([e.event_id for e in targets]))
        m = self.manifest
        if m.run_stage_done("probe") and self.run.probe.exists():
            if m.data["run_stages"]["probe"].get("inputs") == key and \
                    file_digest(self.run.probe) == m.data["run_stages"]["probe"]["checksum"]:
                return load_probe(self.run.probe)
        reports = {}
        cfg = self.config
        for e in targets:
            try:
                _, x, _ = self._queries(e.event_id)
            except Exception as exc:
                m.add_warning(e.event_id, f"probe skipped: {exc}")
                continue
            ladder = broaden_ladder(x, e, cfg.probe_levels)
            window = pull_window(e.t_e, cfg.pre_min, cfg.post_h)

            def pull(q: BooleanQuery, e=e, window=window) -> list[Mention]:
                res = run_query_lifecycle(
                    self.session, f"{e.event_id}-probe", q, window,
                    floor_percent=cfg.backfill_floor, cap_seconds=cfg.backfill_cap_s,
                    poll_interval=cfg.poll_s, page_size=cfg.page_size, max_pages=cfg.max_pages)
                seen: dict[tuple[str, str], Mention] = {}
                for mention in res.all_mentions + res.x_mentions:
                    seen.setdefault((mention.channel, mention.guid), recover_mention(mention, self.oembed))
                return list(seen.values())

            reports[e.event_id] = an.probe_report(e, ladder, pull)
        body = json.dumps({k: [asdict(lv) for lv in v] for k, v in sorted(reports.items())},
                          indent=2, sort_keys=True)
        self.run.probe.write_text(body + "\n", encoding="utf-8")
        m.mark_run_stage("probe", file_digest(self.run.probe), inputs=key)
        self._save()
        return reports

    def analyze(self, events: list[Event], probe: dict[str, list[an.ProbeLevel]] | None = None) -> dict[str, Path]:
        m = self.manifest
        inputs = self._verify_inputs_digest(events) + ":" + m.data["run_stages"].get("probe", {}).get("checksum", "")
        paths = {name: self.run.tables / f"{name}.{ext}" for name in TABLES for ext in ("txt",)}
        if m.run_stage_done("analyze") and m.data["run_stages"]["analyze"].get("inputs") == inputs:
            if self._tables_digest() == m.data["run_stages"]["analyze"]["checksum"]:
                return paths
        if probe is None:
            probe = load_probe(self.run.probe) if self.run.probe.exists() else {}
        earliest = self.earliest_map(events)
        warn = lambda msg: m.add_warning(None, msg)  # noqa: E731
        hits, winners, paired = {}, {}, {}
        for surface, name in SAMPLE_NAMES.items():
            if name not in self.config.surfaces:
                continue
            sample = [e for e in events if e.surface == surface]
            em = {e.event_id: earliest[e.event_id] for e in sample}
            hits[name] = an.hit_rates(sample, em, warn)
            winners[name] = an.winner_shares(em, channels=self.channels)
            paired[name] = an.paired_deltas(em)
        titles = {e.event_id: e.title for e in events}
        tables = {
            "hits": an.hits_table(hits),
            "winners": an.winners_table(winners),
            "paired_a": an.paired_table(*paired.get("wcep", ([], an.summarize_deltas([]))), titles),
            "paired_b": an.paired_table(*paired.get("polymarket", ([], an.summarize_deltas([]))), titles),
            "probe": an.probe_table(probe),
        }
        for name, table in tables.items():
            table.write(self.run.tables, name)
        m.mark_run_stage("analyze", self._tables_digest(), inputs=inputs)
        m.save()
        return paths

    def _tables_digest(self) -> str:
        parts = []
        for name in TABLES:
            for ext in ("txt", "csv", "md"):
                p = self.run.tables / f"{name}.{ext}"
                parts.append(file_digest(p) if p.exists() else "missing")
        return digest("\n".join(parts))

    # --- driver -----------------------------------------------------------------------

    def execute(self, until: str = "analyze") -> RunOutcome:
        """Run every outstanding stage up to ``until`` (a per-event stage, probe or analyze)."""
        m = self.manifest
        events = self.seed()
        outcome = RunOutcome(m)
        if until == "seed":
            return outcome
        stage = until if until in STAGES else "verify"
        for e in events:
            note = self.process_event(e, stage)
            if note:
                outcome.failures.append(note)
        if until in STAGES:
            self._finish(outcome)
            return outcome
        probe = self.probe(events)
        if until == "analyze":
            self.analyze(events, probe)
        self._finish(outcome)
        return outcome

    def _finish(self, outcome: RunOutcome) -> None:
        m = self.manifest
        if isinstance(self.clock, VirtualClock):
            m.data["virtual_elapsed_s"] = m.data.get("virtual_elapsed_s", 0.0) + self.clock.now()
        m.data["failures"] = sorted(set(m.data.get("failures", [])) | set(outcome.failures))
        self._save()


def select_probe_events(events: list[Event], selectors: tuple[str, ...]) -> list[Event]:
    """Events named by id, or whose title or description contains the selector."""
    out = []
    for sel in selectors:
        for e in events:
            hay = f"{e.title}\n{e.description}".casefold()
            if (e.event_id == sel or sel.casefold() in hay) and e not in out:
                out.append(e)
                break
    return out


def load_probe(path: Path) -> dict[str, list[an.ProbeLevel]]:
    data = json.loads(path.read_text(encoding="utf-8"))
    return {k: [an.ProbeLevel(**lv) for lv in v] for k, v in data.items()}


def full_run(config: RunConfig, **inject: Any) -> RunOutcome:
    return Pipeline(config, **inject).execute("analyze")


def resume(run_id: str, out_dir: str | Path = "runs", config: RunConfig | None = None,
           **inject: Any) -> RunOutcome:
    """Continue a run from its manifest. A supplied config must hash the same."""
    run = RunDir(out_dir, run_id)
    manifest = RunManifest.load(run.manifest)
    snapshot = RunConfig.from_dict(manifest.data["config"])
    snapshot = snapshot.replace(out_dir=str(out_dir), run_id=run_id)
    if config is not None and config.hash() != manifest.data["config_hash"]:
        raise ManifestError(f"config differs from the one run {run_id} was created with; refusing to resume")
    if snapshot.hash() != manifest.data["config_hash"]:
        raise ManifestError(f"manifest of run {run_id} does not match its own config snapshot")
    return Pipeline(snapshot, resume_only=True, **inject).execute("analyze")
