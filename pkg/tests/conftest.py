"""Shared fixtures: the battery groups and cached pipeline artifacts.

Move-set enumeration and pipeline runs are expensive; everything heavy is
computed once per session and shared.
"""

from __future__ import annotations

import pytest

from stabring.groups import load_group
from stabring.pipeline import PipelineConfig, run_pipeline
from stabring.ring import build_ring

BATTERY_SPECS = {
    "trivial": {"kind": "cyclic", "order": 1},
    "C2": {"kind": "cyclic", "order": 2},
    "C3": {"kind": "cyclic", "order": 3},
    "C4": {"kind": "cyclic", "order": 4},
    "C2xC2": {"kind": "product", "factors": [{"kind": "cyclic", "order": 2},
                                             {"kind": "cyclic", "order": 2}]},
    "S3": {"kind": "perm", "generators": [[[1, 2]], [[1, 2, 3]]]},
}

# acceptance windows: n <= 4, p <= 3 for |G| <= 4; n <= 3, p <= 2 for order 6
BATTERY_WINDOWS = {
    "trivial": (4, 3),
    "C2": (4, 3),
    "C3": (4, 3),
    "C4": (4, 3),
    "C2xC2": (4, 3),
    "S3": (3, 2),
}

ABELIAN_BATTERY = ("trivial", "C2", "C3", "C4", "C2xC2")


@pytest.fixture(scope="session")
def groups():
    return {name: load_group(spec) for name, spec in BATTERY_SPECS.items()}


@pytest.fixture(scope="session")
def rings(groups):
    """Graded rings at the acceptance windows, one per battery group."""
    out = {}
    for name, G in groups.items():
        n_max, _ = BATTERY_WINDOWS[name]
        out[name] = build_ring(G, n_max)
    return out


@pytest.fixture(scope="session")
def reports(groups):
    """Full pipeline reports at the acceptance windows."""
    out = {}
    for name in BATTERY_SPECS:
        n_max, p_max = BATTERY_WINDOWS[name]
        config = PipelineConfig(group=BATTERY_SPECS[name], n_max=n_max, p_max=p_max,
                                threads=2, well_definedness_samples=1000)
        out[name] = run_pipeline(config)
    return out


def verdict_of(report, check: str) -> dict:
    for v in report.verdicts:
        if v["check"] == check:
            return v
    raise KeyError(f"no verdict {check!r} in report")
