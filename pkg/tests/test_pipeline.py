import os

import pytest

from newsrace.pipeline import (
    TABLES,
    ConfigError,
    Pipeline,
    RunConfig,
    full_run,
    project_budget,
    resume,
)
from newsrace.provider import MockProvider, ProviderError, VirtualClock, load_documents
from newsrace.store import ManifestError, RunManifest

TABLE_FILES = [f"{name}.{ext}" for name in TABLES for ext in ("txt", "csv", "md")]


def config(fixtures_dir, out, **kw):
    return RunConfig.load(fixtures_dir / "mock.yaml", {"out_dir": str(out), **kw})


class CountingProvider(MockProvider):
    """Mock provider that fails on demand and counts creates."""

    def __init__(self, docs, fail_on=(), status=400):
        super().__init__(docs, VirtualClock())
        self.fail_on, self.status, self.created = fail_on, status, []

    def create(self, boolean, name):
        self.created.append(name)
        if any(key in name for key in self.fail_on):
            raise ProviderError(self.status, "query rejected")
        return super().create(boolean, name)


class TestEndToEnd:
    def test_tables_and_manifest(self, mock_run):
        _, outcome, run = mock_run
        assert outcome.exit_code == 0
        assert sorted(p.name for p in (run / "tables").iterdir()) == sorted(TABLE_FILES)
        m = outcome.manifest.data
        assert len(m["events"]) == 159
        assert all(rec["status"] in ("hit", "zero_hit") for rec in m["events"].values())
        assert m["request_count"] > 0

    def test_design_is_met(self, mock_run, design):
        events = mock_run[1].manifest.data["events"]
        assert set(events) == set(design)
        for eid, d in design.items():
            ver = events[eid]["verification"]
            assert bool(ver) == d["hit"], eid
            if d["outcome"].startswith("win:") or d["outcome"].startswith("pair:"):
                first = min(ver.values(), key=lambda v: v["ts"])
                assert first["ts"] == min(v["ts"] for v in ver.values())

    def test_zero_hit_share(self, mock_run):
        events = mock_run[1].manifest.data["events"]
        wcep = [r for k, r in events.items() if k.startswith("wcep-")]
        assert sum(r["status"] == "zero_hit" for r in wcep) == 12
        assert sum(not r["pull_counts"] for r in wcep) == 12

    def test_limiter_respected_globally(self, mock_run):
        m = mock_run[1].manifest.data
        n = m["request_count"]
        # the virtual clock only advances by limiter and backfill waits
        assert m["virtual_elapsed_s"] >= ((n - 1) // 28) * 600

    def test_secrets_stay_out_of_manifest(self, mock_run, monkeypatch):
        text = (mock_run[2] / "manifest.json").read_text()
        assert "TOKEN" not in text and "API_KEY" not in text

    def test_empty_window(self, fixtures_dir, tmp_path):
        cfg = config(fixtures_dir, tmp_path, wcep_from="2030-01-01", wcep_to="2030-01-31",
                     pm_from="2030-01-01", pm_to="2030-01-31")
        out = full_run(cfg)
        assert out.manifest.data["events"] == {} and out.exit_code == 0
        hits = (tmp_path / "mock" / "tables" / "hits.txt").read_text()
        assert hits.splitlines()[0].split() == ["category", "wcep", "polymarket"]
        assert len(hits.splitlines()) == 2


class TestFailures:
    def test_4xx_marks_failed_drafting(self, fixtures_dir, tmp_path):
        cfg = config(fixtures_dir, tmp_path, surfaces=["polymarket"], probe=[])
        provider = CountingProvider(load_documents(fixtures_dir / "mentions.jsonl"), fail_on=("pm-510004",))
        out = full_run(cfg, provider=provider)
        assert out.exit_code == 2
        rec = out.manifest.data["events"]["pm-510004"]
        assert rec["status"] == "failed_drafting" and "query rejected" in rec["errors"][0]
        assert sum(r["status"] == "hit" for r in out.manifest.data["events"].values()) == 55

    def test_config_rejects_unknown_and_bad_values(self, fixtures_dir, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"api_key": "secret"})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"rate_cap": 0})
        with pytest.raises(ConfigError):
            RunConfig.from_dict({"mode": "cloud"})

    def test_live_mode_needs_env(self, tmp_path):
        cfg = RunConfig.from_dict({"mode": "live", "out_dir": str(tmp_path)})
        with pytest.raises(ConfigError, match="BRANDWATCH_TOKEN"):
            Pipeline(cfg, env={})


class TestResume:
    def test_resume_after_pull_runs_verify_only(self, fixtures_dir, tmp_path):
        cfg = config(fixtures_dir, tmp_path, probe=[])
        Pipeline(cfg).execute("pull")
        m = RunManifest.load(tmp_path / "mock" / "manifest.json").data
        pull_sums = {k: r["stages"]["pull"]["checksum"] for k, r in m["events"].items()
                     if "pull" in r["stages"]}
        assert all("verify" not in r["stages"] for r in m["events"].values())

        provider = CountingProvider(load_documents(fixtures_dir / "mentions.jsonl"))
        out = resume("mock", tmp_path, provider=provider)
        assert provider.created == [] and provider.calls == []
        after = out.manifest.data["events"]
        assert {k: after[k]["stages"]["pull"]["checksum"] for k in pull_sums} == pull_sums
        assert (tmp_path / "mock" / "tables" / "hits.txt").exists()

    def test_completed_resume_is_noop(self, fixtures_dir, tmp_path):
        cfg = config(fixtures_dir, tmp_path)
        full_run(cfg)
        tables = {f: (tmp_path / "mock" / "tables" / f).read_bytes() for f in TABLE_FILES}
        mtimes = {f: os.stat(tmp_path / "mock" / "tables" / f).st_mtime_ns for f in TABLE_FILES}
        provider = CountingProvider([])
        resume("mock", tmp_path, provider=provider)
        assert provider.calls == []
        assert {f: (tmp_path / "mock" / "tables" / f).read_bytes() for f in TABLE_FILES} == tables
        assert {f: os.stat(tmp_path / "mock" / "tables" / f).st_mtime_ns for f in TABLE_FILES} == mtimes

    def test_interrupted_pull_reuses_query_id(self, fixtures_dir, tmp_path):
        cfg = config(fixtures_dir, tmp_path, surfaces=["polymarket"], probe=[])

        class Dies(CountingProvider):
            dead = True

            def mentions(self, *a, **kw):
                if self.dead:
                    raise KeyboardInterrupt
                return super().mentions(*a, **kw)

        provider = Dies(load_documents(fixtures_dir / "mentions.jsonl"))
        with pytest.raises(KeyboardInterrupt):
            Pipeline(cfg, provider=provider).execute()
        m = RunManifest.load(tmp_path / "mock" / "manifest.json").data
        (eid, rec), = [(k, r) for k, r in m["events"].items() if r["query_id"]]
        assert rec["query_deleted"] is False and "pull" not in rec["stages"]

        # the saved query still exists provider-side and is adopted, not recreated
        provider.dead, provider.created = False, []
        out = resume("mock", tmp_path, provider=provider)
        assert f"newsrace-{eid}" not in provider.created
        assert out.manifest.data["events"][eid]["stages"]["pull"]["status"] == "done"
        assert provider.registry == {}

    def test_changed_config_refused(self, fixtures_dir, tmp_path):
        full_run(config(fixtures_dir, tmp_path, surfaces=["polymarket"], probe=[]))
        with pytest.raises(ManifestError, match="refusing"):
            resume("mock", tmp_path, config(fixtures_dir, tmp_path, surfaces=["polymarket"], pm_top=10))
        with pytest.raises(ManifestError):
            Pipeline(config(fixtures_dir, tmp_path, surfaces=["polymarket"], pm_top=10))

    def test_corrupt_manifest(self, tmp_path):
        path = tmp_path / "r" / "manifest.json"
        path.parent.mkdir()
        path.write_text("{not json")
        with pytest.raises(ManifestError, match="corrupt"):
            resume("r", tmp_path)
        path.write_text("{}")
        with pytest.raises(ManifestError, match="missing"):
            resume("r", tmp_path)
        with pytest.raises(ManifestError, match="no manifest"):
            resume("absent", tmp_path)

    def test_tampered_stage_output_is_redone(self, fixtures_dir, tmp_path):
        cfg = config(fixtures_dir, tmp_path, surfaces=["polymarket"], probe=[])
        full_run(cfg)
        stage = tmp_path / "mock" / "stages" / "verify" / "pm-510001.jsonl"
        stage.write_text("")
        out = resume("mock", tmp_path)
        rec = out.manifest.data["events"]["pm-510001"]
        assert rec["status"] == "hit" and stage.read_text()
        assert any("changed" in w for w in rec["warnings"])


def test_budget_projection():
    plan = project_budget(109)
    assert plan.per_event == 22 and plan.requests == 2398
    assert plan.hours >= 5
