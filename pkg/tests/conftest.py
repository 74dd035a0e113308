"""Shared fixtures: frames are expensive to search, so build once per session."""

import pytest

from sicq.sicframe import known_sic, search_sic
from sicq.sicrep import build_structure


@pytest.fixture(scope="session")
def frames():
    """SIC frames for d = 2..6: analytic where shipped, searched otherwise."""
    out = {2: known_sic(2), 3: known_sic(3)}
    for d in (4, 5, 6):
        out[d] = search_sic(d, seeds=range(8), max_iters=1500, target_residual=1e-8)
    return out


@pytest.fixture(scope="session")
def structures(frames):
    return {d: build_structure(frames[d]) for d in (2, 3, 4, 5)}
