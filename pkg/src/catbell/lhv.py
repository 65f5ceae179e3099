"""Deterministic hidden-variable assignments and their CHSH values."""

import itertools
from typing import NamedTuple

import numpy as np


class HiddenAssignment(NamedTuple):
    blue_a: int
    green_a: int
    blue_b: int
    green_b: int

    def validate(self):
        if any(v not in (-1, 1) for v in self):
            raise ValueError(f"hidden values must be +-1, got {tuple(self)}")
        return self


def all_assignments() -> list[HiddenAssignment]:
    return [HiddenAssignment(*v) for v in itertools.product((1, -1), repeat=4)]


def chsh_of_assignment(a: HiddenAssignment) -> int:
    a = HiddenAssignment(*a).validate()
    return (a.blue_a * a.blue_b - a.blue_a * a.green_b
            + a.green_a * a.blue_b + a.green_a * a.green_b)


def mixture_values(weights) -> np.ndarray:
    """CHSH value of each mixture; rows of ``weights`` are distributions over ``all_assignments()``."""
    values = np.array([chsh_of_assignment(a) for a in all_assignments()], dtype=float)
    return np.asarray(weights, dtype=float) @ values


def mixture_bound(samples: int, seed: int) -> tuple[float, float]:
    """Extremes of the CHSH value over ``samples`` random (Dirichlet) mixtures."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(16), size=samples)
    values = mixture_values(weights)
    return float(values.min()), float(values.max())
