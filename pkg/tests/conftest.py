from __future__ import annotations

import sys
import warnings
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from setcover_reopt.core import DuplicateExtentWarning, Instance, NamedSet  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

WEIGHTS = [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]


@pytest.fixture(autouse=True)
def _quiet_duplicate_extents():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DuplicateExtentWarning)
        yield


@pytest.fixture
def triangle() -> Instance:
    return Instance.build(["1", "2", "3"], {"a": {"1", "2"}, "b": {"2", "3"}, "c": {"1", "3"}})


@st.composite
def instances(draw, max_elements=6, max_sets=7, weighted=None, min_elements=1):
    n = draw(st.integers(min_elements, max_elements))
    m = draw(st.integers(1, max_sets))
    elements = [f"e{i}" for i in range(n)]
    extents = [
        {e for e in elements if draw(st.booleans())}
        for _ in range(m)
    ]
    for e in elements:
        if not any(e in ext for ext in extents):
            extents[draw(st.integers(0, m - 1))].add(e)
    w = draw(st.booleans()) if weighted is None else weighted
    weights = [draw(st.sampled_from(WEIGHTS)) if w else Fraction(1) for _ in range(m)]
    family = tuple(NamedSet(f"s{i}", ext, wt) for i, (ext, wt) in enumerate(zip(extents, weights)))
    return Instance(tuple(elements), family, w)
