import io
import json
import os

import pytest
from hypothesis import HealthCheck, given, settings as hsettings

from conftest import make_context
from strategies import contexts
from reconchain.errors import ConfigError, CorruptArtifact, ProjectLocked, SchemaMismatch, UsageError
from reconchain.models import TargetSpec
from reconchain.orchestrator import (
    TIMING_LABELS,
    RunConfig,
    Settings,
    build_backends,
    load_narration,
    load_stage,
    main,
    parse_cli,
    run_pipeline,
    save_stage,
)
from reconchain.orchestrator.pipeline import project_dir_for

BASE = ["--ip", "10.0.2.15,10.0.3.0/24", "--ports", "1-65535"]


def offline_config(name="acme", **kw):
    return RunConfig(targets=TargetSpec.parse("10.0.2.15,10.0.3.0/24", "1-65535"), project_name=name, offline=True, **kw)


class CountingFetcher:
    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    def fetch(self, file_path):
        self.calls += 1
        return self.inner.fetch(file_path)


def instrumented(config, settings):
    backends = build_backends(config, settings, project_dir_for(config, settings))
    backends.fetcher = CountingFetcher(backends.fetcher)
    return backends


# ---- CLI parsing


def test_parse_cli_defaults():
    config = parse_cli(BASE + ["--project", "acme"])
    assert config.scanner_kind == "nmap" and config.nlp_kind == "remote"
    assert config.exploiter_kind == "exploitdb" and config.reporter_kind == "markdown"
    assert config.resume_from is None and not config.offline
    assert config.targets.addresses == ("10.0.2.15", "10.0.3.0/24")


def test_missing_project_is_usage_error():
    with pytest.raises(UsageError, match="--project"):
        parse_cli(BASE)


def test_unknown_scanner_lists_choices():
    with pytest.raises(UsageError) as err:
        parse_cli(BASE + ["--project", "acme", "--scanner", "nessus"])
    assert "nmap" in str(err.value) and "fixture" in str(err.value)


@pytest.mark.parametrize("bad", [["--ip", "10.0.0.300", "--ports", "80"], ["--ip", "10.0.0.1", "--ports", "0-70000"]])
def test_bad_targets_are_usage_errors(bad):
    with pytest.raises(UsageError):
        parse_cli(bad + ["--project", "acme"])


def test_bad_project_name():
    with pytest.raises(UsageError, match="project"):
        parse_cli(BASE + ["--project", "../etc"])


def test_resume_from_must_be_stage():
    assert parse_cli(BASE + ["--project", "a", "--resume-from", "narrate"]).resume_from == "narrate"
    with pytest.raises(UsageError):
        parse_cli(BASE + ["--project", "a", "--resume-from", "deploy"])


# ---- settings


def test_config_file_and_env_override(tmp_path):
    path = tmp_path / "rc.conf"
    path.write_text("# comment\nnlp_model = 'gpt-x'\nnvd_request_delay_ms = 700\n\nnvd_api_key=abc\n")
    settings = Settings.load(path, environ={"NLP_MODEL": "other", "NVD_API_KEY": ""})
    assert settings.get("nlp_model") == "other"
    assert settings.number("nvd_request_delay_ms") == 700.0
    assert settings.get("nvd_api_key") == "abc"


def test_config_unknown_key(tmp_path):
    path = tmp_path / "rc.conf"
    path.write_text("nvd_api_key = x\nclient_logo = y.png\n")
    with pytest.raises(ConfigError, match="2: unknown setting 'client_logo'"):
        Settings.load(path, environ={})


def test_config_malformed_line(tmp_path):
    path = tmp_path / "rc.conf"
    path.write_text("just words\n")
    with pytest.raises(ConfigError):
        Settings.load(path, environ={})


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        Settings.load(tmp_path / "absent.conf", environ={})


def test_non_numeric_setting():
    with pytest.raises(ConfigError):
        Settings({"nlp_temperature": "warm"}).number("nlp_temperature")


def test_remote_nlp_needs_key(offline_settings, tmp_path):
    config = RunConfig(targets=TargetSpec.parse("10.0.0.1", "80"), project_name="p", nlp_kind="remote")
    with pytest.raises(ConfigError, match="nlp_api_key"):
        build_backends(config, offline_settings, tmp_path)


# ---- persistence


def test_round_trip_three_hosts(tmp_path):
    ctx = make_context({"10.0.2.15": {80: ["CVE-2011-3192"]},
                        "10.0.3.10": {22: ["CVE-2015-5600"], 80: ["CVE-2011-3192"]},
                        "10.0.3.20": {21: ["CVE-2015-3306"]}})
    save_stage(tmp_path, "exploit", ctx)
    assert load_stage(tmp_path, "exploit") == ctx


def test_saved_artifact_is_canonical(tmp_path):
    ctx = make_context({"10.0.0.1": {80: ["CVE-2011-3192"]}})
    first = save_stage(tmp_path, "enrich", ctx).read_bytes()
    second = save_stage(tmp_path, "enrich", load_stage(tmp_path, "enrich")).read_bytes()
    assert first == second


@given(contexts())
@hsettings(max_examples=60, suppress_health_check=[HealthCheck.function_scoped_fixture])
def test_round_trip_generated(tmp_path, ctx):
    assert ctx.check_invariants() == []
    save_stage(tmp_path, "exploit", ctx)
    assert load_stage(tmp_path, "exploit") == ctx


def test_future_schema_version(tmp_path):
    path = save_stage(tmp_path, "scan", make_context({"10.0.0.1": {80: []}}))
    data = json.loads(path.read_text())
    data["schema_version"] = 99
    path.write_text(json.dumps(data))
    with pytest.raises(SchemaMismatch, match="99"):
        load_stage(tmp_path, "scan")


def test_edited_artifact_missing_vulnerability(tmp_path):
    path = save_stage(tmp_path, "enrich", make_context({"10.0.0.1": {80: ["CVE-2011-3192", "CVE-2007-6750"]}}))
    data = json.loads(path.read_text())
    del data["vulnerabilities"]["CVE-2007-6750"]
    path.write_text(json.dumps(data))
    with pytest.raises(CorruptArtifact, match="CVE-2007-6750"):
        load_stage(tmp_path, "enrich")


def test_membership_disagreement(tmp_path):
    path = save_stage(tmp_path, "enrich", make_context({"10.0.0.1": {80: ["CVE-2011-3192"]}}))
    data = json.loads(path.read_text())
    data["membership"][0]["cve_ids"] = []
    path.write_text(json.dumps(data))
    with pytest.raises(CorruptArtifact, match="membership"):
        load_stage(tmp_path, "enrich")


@pytest.mark.parametrize("content", ["{not json", "[1, 2]", ""])
def test_unparseable_artifact(tmp_path, content):
    (tmp_path / "scan.json").write_text(content)
    with pytest.raises((CorruptArtifact, SchemaMismatch)):
        load_stage(tmp_path, "scan")


def test_missing_artifact(tmp_path):
    with pytest.raises(CorruptArtifact, match="does not exist"):
        load_stage(tmp_path, "exploit")


# ---- pipeline


def test_offline_run_writes_everything(offline_settings):
    out = io.StringIO()
    summary = run_pipeline(offline_config(), settings=offline_settings, out=out)
    project = summary.project_dir
    for name in ("scan.json", "enriched.json", "exploited.json", "narratives.json", "report.md", "timings.json"):
        assert (project / name).is_file(), name
    assert not (project / ".lock").exists()
    assert summary.stages_run == ["scan", "enrich", "exploit", "narrate", "report"]
    assert [t.stage for t in summary.timings] == list(TIMING_LABELS)
    text = out.getvalue()
    for label in TIMING_LABELS:
        assert label in text
    assert "Report written to" in text
    assert any((project / "exploits").iterdir())


def test_resume_from_narrate_skips_earlier_stages(offline_settings):
    config = offline_config()
    run_pipeline(config, settings=offline_settings, out=io.StringIO())
    before = load_stage(project_dir_for(config, offline_settings), "exploit")

    resumed = offline_config(resume_from="narrate")
    backends = instrumented(resumed, offline_settings)
    summary = run_pipeline(resumed, backends=backends, settings=offline_settings, out=io.StringIO())
    assert backends.scanner.calls == 0
    assert backends.nvd.requests_made == 0
    assert backends.fetcher.calls == 0
    assert summary.stages_run == ["narrate", "report"]
    assert [t.stage for t in summary.timings] == ["Executive Summary", "Finding report", "Render report"]
    _, _, narratives = load_narration(summary.project_dir)
    assert {n.cve_id for n in narratives} == set(before.cve_ids())


def test_resume_from_report_uses_saved_narration(offline_settings):
    config = offline_config()
    first = run_pipeline(config, settings=offline_settings, out=io.StringIO())
    report = first.report_path.read_bytes()
    backends = instrumented(offline_config(resume_from="report"), offline_settings)
    summary = run_pipeline(offline_config(resume_from="report"), backends=backends, settings=offline_settings,
                           out=io.StringIO())
    assert backends.provider.calls == 0
    assert summary.report_path.read_bytes() == report


def test_resume_without_artifacts(offline_settings):
    with pytest.raises(CorruptArtifact):
        run_pipeline(offline_config(resume_from="enrich"), settings=offline_settings, out=io.StringIO())


def test_locked_project(offline_settings):
    config = offline_config()
    project = project_dir_for(config, offline_settings)
    project.mkdir(parents=True)
    (project / ".lock").write_text("1234")
    with pytest.raises(ProjectLocked):
        run_pipeline(config, settings=offline_settings, out=io.StringIO())
    assert (project / ".lock").exists()


def test_unreachable_mirror_degrades(offline_settings, tmp_path):
    settings = Settings(dict(offline_settings.values, exploit_mirror_url=str(tmp_path / "empty")))
    (tmp_path / "empty").mkdir()
    out = io.StringIO()
    summary = run_pipeline(offline_config(), settings=settings, out=out)
    assert any(d.startswith("exploit:") for d in summary.degradations)
    assert "Some exploits could not be downloaded" in summary.report_path.read_text()
    assert "Completed with degradations" in out.getvalue()


# ---- main


def test_main_exit_codes(clean_env, capsys):
    assert main(BASE + ["--project", "ok", "--offline"]) == 0
    assert (clean_env / "ok" / "report.md").is_file()
    assert main(BASE) == 2
    assert "--project" in capsys.readouterr().err
    assert main(["--ip", "10.0.0.1", "--ports", "80", "--project", "p", "--nlpagent", "remote", "--scanner", "fixture"]) == 3
    assert "nlp_api_key" in capsys.readouterr().err


def test_main_missing_nmap_is_fatal(clean_env, tmp_path, capsys):
    conf = tmp_path / "rc.conf"
    conf.write_text(f"nmap_binary = {tmp_path / 'no-such-nmap'}\n")
    code = main(["--ip", "10.0.0.1", "--ports", "80", "--project", "p", "--nlpagent", "stub", "--config", str(conf)])
    assert code == 3
    assert "nmap" in capsys.readouterr().err


def test_summary_subcommand(clean_env, capsys):
    assert main(BASE + ["--project", "s", "--offline"]) == 0
    capsys.readouterr()
    assert main(["summary", "--project", "s"]) == 0
    text = capsys.readouterr().out
    assert "CVE-2015-3306" in text and "exploits/" in text


def test_summary_without_results(clean_env, capsys):
    assert main(["summary", "--project", "nothing"]) == 2


def test_compile_subcommand(clean_env, capsys, monkeypatch):
    from reconchain.orchestrator import cli

    seen = []

    class Done:
        returncode, stdout, stderr = 0, "", ""

    def fake_compile(spec, workdir):
        seen.append((spec.command_line, workdir))
        return Done()

    monkeypatch.setattr(cli, "run_compile", fake_compile)
    assert main(BASE + ["--project", "c", "--offline"]) == 0
    ctx = load_stage(clean_env / "c", "exploit")
    target = next(r for refs in ctx.exploits.values() for r in refs if r.compile_spec)
    capsys.readouterr()
    assert main(["compile", "--project", "c", "--exploit", str(target.entry.exploit_id)]) == 0
    assert seen == [(target.compile_spec.command_line, clean_env / "c" / "exploits")]
    assert f"$ {target.compile_spec.command_line}" in capsys.readouterr().out


def test_compile_refuses_non_compilable(clean_env, capsys):
    assert main(BASE + ["--project", "c", "--offline"]) == 0
    ctx = load_stage(clean_env / "c", "exploit")
    script = next(r for refs in ctx.exploits.values() for r in refs if r.local_path and not r.compile_spec)
    capsys.readouterr()
    assert main(["compile", "--project", "c", "--exploit", str(script.entry.exploit_id)]) == 2
    assert "no compile command" in capsys.readouterr().err
    assert main(["compile", "--project", "c", "--exploit", "999999"]) == 2
    assert "not downloaded" in capsys.readouterr().err


def test_no_stale_lock_after_failure(clean_env):
    assert main(["--ip", "10.0.0.1", "--ports", "80", "--project", "f", "--scanner", "fixture"]) == 3
    assert not (clean_env / "f" / ".lock").exists()
    assert os.listdir(clean_env / "f") == []
