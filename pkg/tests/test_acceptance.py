"""Acceptance suite. Each criterion is one or more tests sharing a ``criterion`` mark;
the terminal summary prints one PASS/FAIL line per criterion."""

import csv
import io
import itertools
import json
import random
import re
import time

import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from conftest import FIXTURES, entry, make_context, many_cves
from strategies import contexts
from reconchain.data import ELASTICSEARCH_SCAN, EXPLOIT_INDEX, SMB_SCAN, data_path
from reconchain.enricher import severity_from_score
from reconchain.errors import CorruptArtifact, SchemaMismatch
from reconchain.exploiter import detect_language, extract_compile_spec, is_framework_module, load_index, search
from reconchain.exploiter.index import ExploitIndex
from reconchain.models import LANGUAGES, FindingNarrative, TargetSpec
from reconchain.nlp import ProviderParams, StubProvider, generate_executive_summary, generate_findings, validate_narrative
from reconchain.orchestrator import TIMING_LABELS, RunConfig, Settings, load_stage, main, run_pipeline, save_stage
from reconchain.scanner import parse_scan_xml

PARAMS = ProviderParams(model_name="stub")


def offline_run(root, name="acme"):
    config = RunConfig(
        targets=TargetSpec.parse("10.0.2.15,10.0.3.0/24", "1-65535"), project_name=name, offline=True
    )
    settings = Settings({"projects_dir": str(root / "projects"), "nvd_cache_dir": str(root / "nvd")})
    out = io.StringIO()
    return run_pipeline(config, settings=settings, out=out), out.getvalue()


# AC1 --------------------------------------------------------------------------


@pytest.mark.criterion(1, "offline fixture run finishes under 10 s with byte-identical report.md")
def test_ac1_offline_determinism(tmp_path):
    started = time.perf_counter()
    first, _ = offline_run(tmp_path / "a")
    elapsed = time.perf_counter() - started
    second, _ = offline_run(tmp_path / "b")
    assert elapsed < 10.0
    assert first.report_path.read_bytes() == second.report_path.read_bytes()
    assert first.report_path.stat().st_size > 0


# AC2 --------------------------------------------------------------------------


@pytest.mark.criterion(2, "CVE-2014-3120 on the Elasticsearch port and CVE-2017-0144 on SMB")
def test_ac2_cve_extraction():
    (es,) = parse_scan_xml(data_path(*ELASTICSEARCH_SCAN).read_bytes())
    assert "CVE-2014-3120" in next(p for p in es.ports if p.port == 9200).cve_ids
    (smb,) = parse_scan_xml(data_path(*SMB_SCAN).read_bytes())
    assert "CVE-2017-0144" in next(p for p in smb.ports if p.port == 445).cve_ids


# AC3 --------------------------------------------------------------------------


def _contract_orders(entries):
    def ok(seq):
        return all(
            (a.verified, a.date, -a.exploit_id) >= (b.verified, b.date, -b.exploit_id) for a, b in zip(seq, seq[1:])
        )
    return [list(p) for p in itertools.permutations(entries) if ok(p)]


@pytest.mark.criterion(3, "CVE-2017-0144 search finds a framework module; sort order matches brute force")
def test_ac3_search_framework_module():
    index = load_index(data_path(*EXPLOIT_INDEX).read_bytes())
    results = search(index, "CVE-2017-0144")
    assert results
    assert any(is_framework_module(e) for e in results)


@pytest.mark.criterion(3, "CVE-2017-0144 search finds a framework module; sort order matches brute force")
def test_ac3_sort_oracle():
    entries = [
        entry(300, "a", ["CVE-2020-0001"], verified=False, date="2019-01-01"),
        entry(100, "b", ["CVE-2020-0001"], verified=False, date="2021-01-01"),
        entry(200, "c", ["CVE-2020-0001"], verified=True, date="2018-01-01"),
    ]
    (expected,) = _contract_orders(entries)
    assert search(ExploitIndex(entries), "CVE-2020-0001") == expected


# AC4 --------------------------------------------------------------------------


def _cvss_table(score):
    if score == 0.0:
        return "none"
    if score < 4.0:
        return "low"
    if score < 7.0:
        return "medium"
    if score < 9.0:
        return "high"
    return "critical"


@pytest.mark.criterion(4, "severity bands match the CVSS v3.1 table and are monotone")
def test_ac4_severity_bands():
    for score in (0.0, 0.1, 3.9, 4.0, 6.9, 7.0, 8.9, 9.0, 10.0):
        assert severity_from_score(score) == _cvss_table(score), score
    ranks = ["none", "low", "medium", "high", "critical"]
    rng = random.Random(20231)
    scores = sorted(round(rng.uniform(0, 10), 1) for _ in range(1000))
    bands = [ranks.index(severity_from_score(s)) for s in scores]
    assert bands == sorted(bands)


# AC5 --------------------------------------------------------------------------


@pytest.mark.criterion(5, "stub records exactly 1 + 2N completions; foreign CVE ids are rejected")
@settings(max_examples=15, deadline=None)
@given(st.integers(0, 30))
def test_ac5_call_accounting(n):
    ctx = many_cves(n) if n else make_context({"10.0.0.1": {22: []}})
    assert len(ctx.cve_ids()) == n
    provider = StubProvider()
    generate_executive_summary(ctx, provider, PARAMS)
    generate_findings(ctx, provider, PARAMS)
    assert provider.calls == 1 + 2 * n


@pytest.mark.criterion(5, "stub records exactly 1 + 2N completions; foreign CVE ids are rejected")
@settings(max_examples=200)
@given(
    st.lists(st.builds(lambda y, n: f"CVE-{y}-{n:04d}", st.integers(1999, 2030), st.integers(0, 99999)), min_size=1, max_size=3),
    st.integers(0, 80),
)
def test_ac5_validation_fuzz(tokens, position):
    ctx = make_context({"10.0.0.1": {9200: ["CVE-2014-3120"], 445: ["CVE-2017-0144"]}})
    assume(not set(tokens) & set(ctx.cve_ids()))
    base = "Patch CVE-2014-3120 and CVE-2017-0144 promptly on every host."
    cut = min(position, len(base))
    text = base[:cut] + " " + " ".join(tokens) + " " + base[cut:]
    result = validate_narrative(FindingNarrative("CVE-2014-3120", text, ("patch",), "stub"), ctx)
    assert not result.valid
    assert set(result.offenders) == set(tokens)


# AC6 --------------------------------------------------------------------------


@pytest.mark.criterion(6, "language detection agrees with >= 95% of the labelled corpus; precedence holds")
def test_ac6_language_corpus():
    base = FIXTURES / "languages"
    with (base / "labels.csv").open() as fh:
        corpus = [(base / row["file"], row["label"]) for row in csv.DictReader(fh)]
    assert len(corpus) == 40
    assert {label for _, label in corpus} == set(LANGUAGES)
    hits = sum(detect_language(p.read_bytes(), p.suffix) == label for p, label in corpus)
    print(f"language agreement {hits}/{len(corpus)}")
    assert hits / len(corpus) >= 0.95


@pytest.mark.criterion(6, "language detection agrees with >= 95% of the labelled corpus; precedence holds")
def test_ac6_precedence():
    module = b"class MetasploitModule < Msf::Exploit::Remote\n  include Msf::Exploit::Remote::Tcp\nend\n"
    assert detect_language(module, ".rb") == "metasploit"
    assert detect_language(module, ".txt") == "metasploit"
    assert detect_language(b"#!/usr/bin/env python3\nprint('x')\n", ".sh") == "python"
    assert detect_language(b"#!/bin/bash\necho x\n", ".py") == "shell"


# AC7 --------------------------------------------------------------------------


@pytest.mark.criterion(7, "compile commands recovered from the 10-file corpus; none where absent")
def test_ac7_compile_corpus():
    base = FIXTURES / "compile"
    expected = json.loads((base / "expected.json").read_text())
    assert len(expected) == 10
    for name, command in expected.items():
        local = f"9000_{name}"
        spec = extract_compile_spec((base / name).read_bytes(), local)
        if command is None:
            assert spec is None, name
        else:
            assert spec is not None and spec.command_line == command.format(local=local), name


# AC8 --------------------------------------------------------------------------


@pytest.mark.criterion(8, "load(save(ctx)) == ctx for 200 contexts; corrupt and future artifacts rejected")
@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(contexts())
def test_ac8_round_trip(tmp_path, ctx):
    save_stage(tmp_path, "exploit", ctx)
    assert load_stage(tmp_path, "exploit") == ctx


@pytest.mark.criterion(8, "load(save(ctx)) == ctx for 200 contexts; corrupt and future artifacts rejected")
def test_ac8_rejections(tmp_path):
    ctx = make_context({"10.0.0.1": {80: ["CVE-2011-3192", "CVE-2007-6750"]}})
    path = save_stage(tmp_path, "enrich", ctx)
    original = json.loads(path.read_text())

    future = dict(original, schema_version=99)
    path.write_text(json.dumps(future))
    with pytest.raises(SchemaMismatch):
        load_stage(tmp_path, "enrich")

    dangling = json.loads(json.dumps(original))
    del dangling["vulnerabilities"]["CVE-2007-6750"]
    path.write_text(json.dumps(dangling))
    with pytest.raises(CorruptArtifact):
        load_stage(tmp_path, "enrich")

    path.write_text(json.dumps(original)[:-20])
    with pytest.raises(CorruptArtifact):
        load_stage(tmp_path, "enrich")


# AC9 --------------------------------------------------------------------------


@pytest.mark.criterion(9, "each CVE once in findings and in the overview; exactly the 7 timing labels")
def test_ac9_report_completeness(tmp_path):
    summary, console = offline_run(tmp_path)
    text = summary.report_path.read_text(encoding="utf-8")
    ctx = load_stage(summary.project_dir, "exploit")
    assert len(ctx.cve_ids()) >= 10

    findings = text[text.index("## 7. Technical Findings"):text.index("## Appendix A")]
    headings = re.findall(r"^### 7\.\d+ (CVE-\d{4}-\d+):", findings, re.MULTILINE)
    assert sorted(headings) == sorted(ctx.cve_ids())
    overview = text[text.index("## 6. Assessment Overview"):text.index("### Findings at a glance")]
    for cve in ctx.cve_ids():
        assert cve in overview, cve

    table = console[console.index("Task "):].split("\n\n")[0]
    rows = [line.rsplit(None, 1)[0].strip() for line in table.splitlines()[2:]]
    assert rows == list(TIMING_LABELS) + ["Total time"]


# AC10 -------------------------------------------------------------------------


@pytest.mark.criterion(10, "--offline run makes zero socket connections and exits 0")
def test_ac10_offline_no_network(clean_env, no_network):
    code = main(["--ip", "10.0.2.15,10.0.3.0/24", "--ports", "1-65535", "--project", "air", "--offline"])
    assert code == 0
    assert no_network == []
    assert (clean_env / "air" / "report.md").is_file()
