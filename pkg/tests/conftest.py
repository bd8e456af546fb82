import json
import shutil
from pathlib import Path

import pytest

from newsrace.pipeline import RunConfig, default_fixtures, full_run

FIXTURES = default_fixtures()


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def design() -> dict:
    """Designed per-event outcomes written alongside the corpus."""
    return json.loads((FIXTURES / "design.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def mock_run(tmp_path_factory):
    """One full mock run over the packaged corpus, shared by read-only tests."""
    out = tmp_path_factory.mktemp("runs")
    cfg = RunConfig.load(FIXTURES / "mock.yaml", {"out_dir": str(out)})
    outcome = full_run(cfg)
    return cfg, outcome, out / cfg.run_id


@pytest.fixture
def small_fixtures(tmp_path) -> Path:
    """Writable copy of the corpus for tests that edit it."""
    dst = tmp_path / "fixtures"
    shutil.copytree(FIXTURES, dst)
    return dst


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.call_report = rep


@pytest.fixture
def criterion(request, capsys):
    """Acceptance bookkeeping: the test sets ``number``, ``title`` and ``detail``;
    one PASS/FAIL line is printed to the terminal afterwards."""
    info = {"number": "?", "title": request.node.name, "detail": ""}
    yield info
    rep = getattr(request.node, "call_report", None)
    ok = rep is not None and rep.passed
    detail = info["detail"]
    if not ok and rep is not None and rep.longrepr is not None:
        crash = getattr(rep.longrepr, "reprcrash", None)
        detail = crash.message.splitlines()[0] if crash else "failed"
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {info['number']}: {info['title']}"
              + (f" ({detail})" if detail else ""))
