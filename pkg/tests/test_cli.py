import pytest

from newsrace import cli
from newsrace.provider import MockProvider, ProviderError


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_full_run_default_corpus(tmp_path, capsys):
    code, out, _ = run(["full-run", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "159 events" in out and "candidates=586" in out
    assert (tmp_path / "mock" / "tables" / "winners.txt").exists()


def test_stage_commands_then_resume(tmp_path, capsys):
    base = ["--out", str(tmp_path), "--run", "staged"]
    assert run(["seed-polymarket", *base], capsys)[0] == 0
    code, out, _ = run(["pull", *base], capsys)
    assert code == 0 and "status: pull=109" in out
    code, out, _ = run(["resume", "--run", "staged", "--out", str(tmp_path)], capsys)
    assert code == 0 and "hit=56" in out


def test_seed_wcep_counts(tmp_path, capsys):
    code, out, _ = run(["seed-wcep", "--out", str(tmp_path), "--top", "20"], capsys)
    assert code == 0 and "events=20" in out and "polymarket" not in out


def test_plan(capsys):
    code, out, _ = run(["full-run", "--plan", "109"], capsys)
    assert code == 0
    assert "109 events x 22 requests = 2398 requests" in out and ">= 14.2 h" in out
    code, out, _ = run(["full-run", "--plan", "--surfaces", "polymarket"], capsys)
    assert out.startswith("130 events")


def test_partial_failure_exit_2(tmp_path, capsys, monkeypatch):
    original = MockProvider.create

    def create(self, boolean, name):
        if name.endswith("pm-510004"):
            raise ProviderError(400, "unbalanced")
        return original(self, boolean, name)

    monkeypatch.setattr(MockProvider, "create", create)
    code, out, _ = run(["full-run", "--out", str(tmp_path), "--surfaces", "polymarket"], capsys)
    assert code == 2
    assert "1 event-level failures" in out and "unbalanced" in out


@pytest.mark.parametrize("argv,msg", [
    (["resume", "--run", "nothing"], "no manifest"),
    (["full-run", "--config", "missing.yaml"], "missing.yaml"),
])
def test_fatal_exit_1(tmp_path, capsys, monkeypatch, argv, msg):
    monkeypatch.chdir(tmp_path)
    code, _, err = run(argv, capsys)
    assert code == 1 and msg in err


def test_live_without_credentials_is_fatal(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("BRANDWATCH_TOKEN", raising=False)
    code, _, err = run(["full-run", "--mode", "live", "--out", str(tmp_path)], capsys)
    assert code == 1 and "BRANDWATCH_TOKEN" in err


def test_resume_with_changed_config_refused(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(f"run_id: r\nout_dir: {tmp_path}\nsurfaces: [polymarket]\npm_top: 5\n")
    assert run(["full-run", "--config", str(cfg)], capsys)[0] == 0
    cfg.write_text(f"run_id: r\nout_dir: {tmp_path}\nsurfaces: [polymarket]\npm_top: 6\n")
    code, _, err = run(["resume", "--run", "r", "--out", str(tmp_path), "--config", str(cfg)], capsys)
    assert code == 1 and "refusing" in err
