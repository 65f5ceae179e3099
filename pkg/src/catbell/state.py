"""The circular two-mode cat state and its passage through the optics network.

The state N * integral over s of |r0 e^{is}>_{a1} |r0 e^{-is}>_{b1} ds is
represented by a finite list of coherent branches at uniform phase nodes
(trapezoid rule, exponentially accurate for this periodic integrand).
Anything that can list its branches as ``(gamma_a, gamma_b, weight)``
satisfies :class:`BranchState` and can be fed to the downstream modules.
"""

from dataclasses import dataclass, replace
from typing import Protocol

import numpy as np
from scipy.special import i0e

from .coherent import coherent_overlap
from .errors import NonConvergence

TWO_PI = 2 * np.pi


class BranchState(Protocol):
    """A two-mode state written as sum_k weight_k |gamma_a_k>|gamma_b_k>."""

    def branches(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(gamma_a, gamma_b, weights)``, weights including normalisation."""
        ...

    def refined(self) -> "BranchState":
        """The same state on a finer branch discretisation."""
        ...


@dataclass(frozen=True)
class CatStateSpec:
    r0: float = 1.1
    k_points: int = 64

    def __post_init__(self):
        if self.r0 < 0:
            raise ValueError("r0 must be nonnegative")
        if self.k_points < 1:
            raise ValueError("k_points must be positive")

    @property
    def node_angles(self):
        return TWO_PI * np.arange(self.k_points) / self.k_points

    @property
    def node_weights(self):
        return np.full(self.k_points, TWO_PI / self.k_points)

    def refined(self):
        return replace(self, k_points=2 * self.k_points)

    def branches(self):
        s = self.node_angles
        gamma = self.r0 * np.exp(1j * s)
        norm = np.sqrt(_norm_constant_at(self))
        return gamma, np.conj(gamma), norm * self.node_weights.astype(complex)


@dataclass(frozen=True)
class NetworkConfig:
    """Drive amplitudes and polariser angles for both parties."""

    alpha: float
    beta: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative reals")
        object.__setattr__(self, "theta", float(np.mod(self.theta, TWO_PI)))
        object.__setattr__(self, "phi", float(np.mod(self.phi, TWO_PI)))


@dataclass(frozen=True)
class BranchLabels:
    """Coherent amplitudes of the four detected modes; arrays over branches."""

    c_plus: np.ndarray
    c_minus: np.ndarray
    d_plus: np.ndarray
    d_minus: np.ndarray


def polariser_outputs(gamma_in, drive, angle):
    """Transmitted and orthogonal mode amplitudes for one party.

    ``gamma_in`` is the microscopic mode amplitude, ``drive`` the real
    coherent drive and ``angle`` the polariser setting (transmission axis at
    angle / 2).
    """
    gamma_in = np.asarray(gamma_in, dtype=complex)
    lo = gamma_in * np.exp(-0.5j * angle)
    hi = drive * np.exp(0.5j * angle)
    plus = 1j * (lo + hi) / np.sqrt(2)
    minus = (hi - lo) / np.sqrt(2)
    return plus, minus


def branch_labels(varsigma, spec: CatStateSpec, net: NetworkConfig) -> BranchLabels:
    """Labels of the four detected modes for the cat branch(es) at phase ``varsigma``."""
    gamma = spec.r0 * np.exp(1j * np.asarray(varsigma, dtype=float))
    return labels_for(gamma, np.conj(gamma), net)


def labels_for(gamma_a, gamma_b, net: NetworkConfig) -> BranchLabels:
    c_plus, c_minus = polariser_outputs(gamma_a, net.alpha, net.theta)
    d_plus, d_minus = polariser_outputs(gamma_b, net.beta, net.phi)
    return BranchLabels(c_plus, c_minus, d_plus, d_minus)


def overlap_kernel(spec: CatStateSpec):
    """Matrix <branch_k|branch_l> over the phase nodes."""
    gamma = spec.r0 * np.exp(1j * spec.node_angles)
    ga, gb = gamma, np.conj(gamma)
    return coherent_overlap(ga[:, None], ga[None, :]) * coherent_overlap(gb[:, None], gb[None, :])


def _norm_constant_at(spec: CatStateSpec) -> float:
    w = spec.node_weights
    return 1.0 / float(np.real(w @ overlap_kernel(spec) @ w))


def norm_constant(spec: CatStateSpec, rtol=1e-8, max_doublings=6) -> float:
    """Squared normalisation N^2 from the discretised double phase integral.

    Doubles the node count until the value moves by less than ``rtol``.
    """
    current = _norm_constant_at(spec)
    for _ in range(max_doublings + 1):
        spec = spec.refined()
        finer = _norm_constant_at(spec)
        if abs(finer - current) <= rtol * abs(finer):
            return current
        current = finer
    raise NonConvergence(f"norm constant unstable up to K={spec.k_points}")


def norm_constant_closed_form(r0: float) -> float:
    """exp(2 r0^2) / (4 pi^2 I0(2 r0^2)), evaluated with the scaled Bessel function."""
    # i0e(z) = exp(-z) I0(z), so the exponentials cancel exactly.
    return 1.0 / (4 * np.pi**2 * i0e(2 * r0 * r0))
