import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catbell.lhv import HiddenAssignment, all_assignments, chsh_of_assignment, mixture_bound, mixture_values


def test_examples():
    assert chsh_of_assignment(HiddenAssignment(1, 1, 1, 1)) == 2
    assert chsh_of_assignment(HiddenAssignment(1, 1, -1, -1)) == -2


def test_exhaustive_enumeration():
    values = [chsh_of_assignment(a) for a in all_assignments()]
    assert len(set(all_assignments())) == 16
    assert set(values) == {-2, 2}
    assert max(values) == 2 and min(values) == -2


def test_rejects_non_unit_values():
    with pytest.raises(ValueError):
        chsh_of_assignment((1, 0, 1, 1))


def test_point_and_uniform_mixtures():
    point = np.zeros(16)
    point[all_assignments().index(HiddenAssignment(1, 1, 1, 1))] = 1.0
    assert mixture_values(point) == pytest.approx(2.0)
    assert mixture_values(np.full(16, 1 / 16)) == pytest.approx(0.0, abs=1e-15)


def test_mixture_bound_seeded():
    assert mixture_bound(1000, 7) == mixture_bound(1000, 7)
    lo, hi = mixture_bound(100_000, 2024)
    assert -2 - 1e-12 <= lo <= hi <= 2 + 1e-12


def test_mixture_bound_needs_samples():
    with pytest.raises(ValueError):
        mixture_bound(0, 1)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=16, max_size=16).filter(lambda w: sum(w) > 0))
def test_any_mixture_within_bound(weights):
    w = np.array(weights) / sum(weights)
    assert abs(mixture_values(w)) <= 2 + 1e-12
