"""Self-tallying boardroom voting: scenario runs, transcript checks, tally bench."""

import json
from pathlib import Path

from ._bbbvote import Error, params_info, verify_transcript_text

__all__ = [
    "Error",
    "bench_tally",
    "params_info",
    "run_scenario",
    "verify_transcript",
    "verify_transcript_text",
]


def run_scenario(scenario, out_dir=None):
    """Run a scenario given as a path or as INI text; returns the report dict."""
    from ._bbbvote import run_scenario_text

    path = Path(scenario) if "\n" not in str(scenario) else None
    if path is not None and path.is_file():
        text, name = path.read_text(), path.stem
    else:
        text, name = str(scenario), "scenario"
    if out_dir is not None:
        out_dir = str(out_dir)
    return json.loads(run_scenario_text(text, name, out_dir))


def verify_transcript(path):
    return verify_transcript_text(Path(path).read_text())


def bench_tally(n_list, k_list, workers=4, backend="ec"):
    from ._bbbvote import bench_tally_json

    return json.loads(bench_tally_json(list(n_list), list(k_list), workers, backend))
