import os
import re

import pytest

from conftest import FIXTURES, entry, make_context
from reconchain.errors import InconsistentInput, TemplateError
from reconchain.models import AssessmentContext, CompileSpec, ExploitRef, FindingNarrative
from reconchain.nlp import ProviderParams, StubProvider, generate_findings
from reconchain.reporter import build_report_model, default_template, render_report

GOLDEN = FIXTURES / "golden" / "report.md"


def golden_inputs():
    refs = {
        "CVE-2015-3306": [
            ExploitRef(entry(37262, "ProFTPd 1.3.5 - 'mod_copy' Command Execution (Metasploit)", ["CVE-2015-3306"],
                             date="2015-06-10", path="exploits/linux/remote/37262.rb"),
                       local_path="exploits/37262_37262.rb", language="metasploit"),
            ExploitRef(entry(36803, "ProFTPd 1.3.5 - 'mod_copy' Remote Command Execution", ["CVE-2015-3306"],
                             verified=False, date="2015-04-21"),
                       local_path=None, language="python", fetch_error="mirror miss"),
        ],
        "CVE-2011-3192": [
            ExploitRef(entry(18221, "Apache HTTP Server 2.x - 'Range' Header Remote Denial of Service", ["CVE-2011-3192"],
                             verified=False, date="2011-12-09", path="exploits/multiple/dos/18221.c", platform="multiple"),
                       local_path="exploits/18221_18221.c", language="c",
                       compile_spec=CompileSpec("gcc -O2 -o range_dos 18221_18221.c -lpthread",
                                                "Compile: gcc -O2 -o range_dos 18221.c -lpthread")),
        ],
    }
    ctx = make_context(
        {"10.0.3.20": {21: ["CVE-2015-3306"], 80: ["CVE-2011-3192"]},
         "10.0.3.10": {80: ["CVE-2011-3192", "CVE-2007-6750"], 22: []}},
        scores={"CVE-2015-3306": 9.8, "CVE-2011-3192": 7.5, "CVE-2007-6750": 5.0},
        exploits=refs,
        descriptions={
            "CVE-2015-3306": "The mod_copy module in ProFTPD 1.3.5 allows remote attackers to read and write to "
                             "arbitrary files via the site cpfr and site cpto commands.",
            "CVE-2011-3192": "The byterange filter in the Apache HTTP Server allows remote attackers to cause a denial "
                             "of service via a Range header | with overlapping ranges. A second sentence.",
            "CVE-2007-6750": "The Apache HTTP Server 1.x and 2.x allows remote attackers to cause a denial of service "
                             "via partial HTTP requests.",
        },
    )
    narratives = [n for n in generate_findings(ctx, StubProvider(), ProviderParams(model_name="stub"))
                  if n.cve_id != "CVE-2007-6750"]
    return ctx, "Three hosts were tested.\n\nTwo need urgent patching.", narratives


def test_empty_assessment_model():
    model = build_report_model(AssessmentContext(), "Nothing found.", [])
    assert model.overview_rows == () and model.findings == ()
    assert model.executive_summary == "Nothing found."
    text = render_report(model, default_template())
    assert "Nothing found." in text


def test_shared_cve_is_one_finding_with_two_affected():
    ctx = make_context({"10.0.0.1": {22: ["CVE-2015-5600"]}, "10.0.0.2": {22: ["CVE-2015-5600"]}})
    model = build_report_model(ctx, "", [])
    assert len(model.findings) == 1
    assert model.findings[0].affected == (("10.0.0.1", "22/tcp"), ("10.0.0.2", "22/tcp"))


def test_findings_sorted_by_severity():
    ctx, summary, narratives = golden_inputs()
    model = build_report_model(ctx, summary, narratives)
    assert [f.cvss_score for f in model.findings] == [9.8, 7.5, 5.0]
    assert [r.address for r in model.overview_rows] == ["10.0.3.10", "10.0.3.20"]
    for finding in model.findings:
        assert any(finding.cve_id in row.cve_ids for row in model.overview_rows)


def test_missing_narrative_is_pending():
    ctx, summary, narratives = golden_inputs()
    model = build_report_model(ctx, summary, narratives)
    pending = next(f for f in model.findings if f.cve_id == "CVE-2007-6750")
    assert pending.status == "pending"
    assert "pending analyst review" in pending.severity_rationale.lower()


def test_unknown_narrative_rejected():
    ctx = make_context({"10.0.0.1": {80: ["CVE-2020-0001"]}})
    stray = FindingNarrative("CVE-2020-9999", "x", ("y",), "stub")
    with pytest.raises(InconsistentInput):
        build_report_model(ctx, "", [stray])


def test_render_is_deterministic():
    ctx, summary, narratives = golden_inputs()
    model = build_report_model(ctx, summary, narratives, "golden")
    assert render_report(model, default_template()) == render_report(model, default_template())


def test_unknown_placeholder_named():
    model = build_report_model(AssessmentContext(), "", [])
    with pytest.raises(TemplateError) as err:
        render_report(model, "# {{ engagement.project_name }}\n{{ client_logo }}\n")
    assert err.value.placeholder == "client_logo"
    assert "client_logo" in str(err.value)


def test_unresolved_attribute_is_template_error():
    model = build_report_model(AssessmentContext(), "", [])
    with pytest.raises(TemplateError):
        render_report(model, "{{ engagement.client_name }}\n")


def test_golden_report():
    ctx, summary, narratives = golden_inputs()
    text = render_report(build_report_model(ctx, summary, narratives, "golden"), default_template())
    if os.environ.get("RECONCHAIN_REGEN_GOLDEN"):
        GOLDEN.write_text(text, encoding="utf-8", newline="\n")
    assert text == GOLDEN.read_text(encoding="utf-8")


def findings_section(text):
    start = text.index("## 7. Technical Findings")
    end = text.index("## Appendix A")
    return text[start:end]


def test_every_cve_once_in_findings_and_in_overview():
    ctx, summary, narratives = golden_inputs()
    text = render_report(build_report_model(ctx, summary, narratives), default_template())
    headings = re.findall(r"^### 7\.\d+ (CVE-\d{4}-\d+):", findings_section(text), re.MULTILINE)
    assert sorted(headings) == sorted(ctx.cve_ids())
    overview = text[text.index("## 6. Assessment Overview"):text.index("### Findings at a glance")]
    for cve in ctx.cve_ids():
        assert cve in overview


def test_narrative_text_preserved_verbatim():
    ctx, summary, narratives = golden_inputs()
    text = render_report(build_report_model(ctx, summary, narratives), default_template())
    assert summary in text
    for n in narratives:
        assert n.severity_rationale in text
        for step in n.remediation_steps:
            assert step in text


def test_required_sections_and_analyst_blocks():
    ctx, summary, narratives = golden_inputs()
    text = render_report(build_report_model(ctx, summary, narratives), default_template())
    for heading in ("## 2. Executive Summary", "## 4. Methodology", "## 6. Assessment Overview",
                    "## 7. Technical Findings", "## Appendix A"):
        assert heading in text
    assert text.count("<!-- ANALYST:") >= 3
    appendix = text[text.index("## Appendix A"):]
    assert "exploits/37262_37262.rb" in appendix and "exploits/18221_18221.c" in appendix
    assert "gcc -O2 -o range_dos 18221_18221.c -lpthread" in text
    assert "Critical (CVSS 9.8)" in text


def test_table_cells_escape_pipes():
    ctx, summary, narratives = golden_inputs()
    text = render_report(build_report_model(ctx, summary, narratives), default_template())
    glance = text[text.index("### Findings at a glance"):text.index("## 7.")]
    assert all(line.count("|") - line.count("\\|") == 6 for line in glance.splitlines() if line.startswith("|"))
