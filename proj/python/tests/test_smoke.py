from pathlib import Path

import pytest

import bbbvote

SCENARIOS = Path(__file__).resolve().parents[2] / "scenarios"


def test_params_small_group():
    info = bbbvote.params_info("ia", "test-small", 3, 2)
    assert info["m"] == 2
    assert info["order_bits"] == 5


def test_fig4_run_and_verify(tmp_path):
    report = bbbvote.run_scenario(SCENARIOS / "fig4.scenario", out_dir=tmp_path)
    assert report["outcome"] == "closed"
    assert report["tally"] == [2, 2]
    assert report["faulty_rounds"] == [["P3"], ["P5"]]
    check = bbbvote.verify_transcript(report["transcript_path"])
    assert check["accepted"]
    assert check["final_phase"] == "CLOSED"


def test_tampered_transcript_rejected(tmp_path):
    report = bbbvote.run_scenario(SCENARIOS / "honest.scenario", out_dir=tmp_path)
    lines = Path(report["transcript_path"]).read_text().splitlines(keepends=True)
    lines.pop(3)
    check = bbbvote.verify_transcript_text("".join(lines))
    assert not check["accepted"]
    assert check["reason"]


def test_inline_scenario_and_diagnostics():
    text = "[params]\nbackend = ia\nprofile = test-small\nn = 3\nk = 2\n" \
           "[choices]\nP1 = 1\nP2 = 2\nP3 = 2\n"
    assert bbbvote.run_scenario(text)["tally"] == [1, 2]
    with pytest.raises(bbbvote.Error, match="line 2"):
        bbbvote.run_scenario("[params]\nbogus = 1\n")


def test_bench_cell():
    out = bbbvote.bench_tally([10], [3], workers=2)
    (cell,) = out["cells"]
    assert cell["recovered"]
    assert cell["space"] == 66
