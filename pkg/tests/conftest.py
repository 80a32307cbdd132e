"""Shared fixtures: disk-cached scenario runs for the acceptance suite.

Heavy scenarios are executed once and their artifact directories reused
across test sessions.  The cache key includes a hash of the package source
tree and the normalized config, so any code or parameter change invalidates
it.  Delete artifacts/ to force a clean rerun.
"""

import hashlib
from pathlib import Path

import pytest

from mbslab.config import ScenarioConfig, serialize
from mbslab.runner import run_scenario
from mbslab.spectra import read_metadata, read_spectrum_csv

REPO = Path(__file__).resolve().parent.parent
ARTIFACTS = REPO / "artifacts" / "acceptance"
SRC = REPO / "src" / "mbslab"


def _tree_hash() -> str:
    h = hashlib.sha256()
    for path in sorted(SRC.rglob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


def run_cached(name: str, cfg: ScenarioConfig) -> dict:
    """Run (or reuse) a scenario; returns {summary, csv, outdir}."""
    outdir = ARTIFACTS / name
    stamp_file = outdir / "stamp.txt"
    stamp = _tree_hash() + "\n" + serialize(cfg)
    if not (stamp_file.exists() and stamp_file.read_text() == stamp):
        run_scenario(cfg, outdir, quiet=True, preset_name=name)
        stamp_file.write_text(stamp)
    summary = read_metadata(outdir / "summary.txt")
    return {"summary": {k: _maybe_float(v) for k, v in summary.items()},
            "csv": read_spectrum_csv(outdir / "spectrum.csv"),
            "outdir": outdir}


def _maybe_float(v):
    try:
        return float(v)
    except ValueError:
        return v


@pytest.fixture(scope="session")
def cached_run():
    return run_cached
