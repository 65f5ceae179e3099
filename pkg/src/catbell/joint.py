"""Exact joint statistics of the two photon-number differences.

For a branch state sum_k w_k |branch_k> every detected mode is coherent
within a branch, so the amplitude of a four-mode Fock tuple is
sum_k w_k prod_modes <n_mode|label_k>.  Squaring and summing over the tuples
with fixed (m, n) factorises into per-party cross sums

    Q_A[m, k, l] = sum_{n+ - n- = m} <n+|c+_k><n-|c-_k> conj(<n+|c+_l><n-|c-_l>)

so that P(m, n) = sum_{k,l} w_k conj(w_l) Q_A[m, k, l] Q_B[n, k, l].  The
branch sum happens inside the square (coherent interference); the
``mixture`` diagnostic instead keeps only k = l, which is the statistics of
the classical mixture of branches.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .coherent import fock_amplitudes, poisson_tail
from .errors import NonConvergence, TruncationTooLossy
from .state import BranchState, NetworkConfig, labels_for

MAX_TRUNCATION_LOSS = 1e-4
K_CONVERGENCE_TOL = 1e-6


@dataclass(frozen=True)
class FockCutoff:
    """Per-mode photon cutoff: mean + sigma_factor * sqrt(mean) + floor.

    ``per_mode_max`` forces a fixed cutoff on every mode.
    """

    sigma_factor: float = 8.0
    floor: int = 15
    per_mode_max: int | None = None

    def for_mean(self, mean: float) -> int:
        if self.per_mode_max is not None:
            return int(self.per_mode_max)
        return int(math.ceil(mean + self.sigma_factor * math.sqrt(mean) + self.floor))


@dataclass(frozen=True)
class MeasurementConfig:
    """Everything a distribution was computed from; used for consistency checks."""

    state: str
    k_points: int
    alpha: float
    beta: float
    theta: float
    phi: float
    cutoffs: tuple[int, int, int, int]
    sigma_factor: float | None
    mixture: bool = False

    def without_angles(self):
        return (self.state, self.k_points, self.alpha, self.beta,
                self.cutoffs, self.sigma_factor, self.mixture)


@dataclass
class JointNumberDistribution:
    m_values: np.ndarray
    n_values: np.ndarray
    probs: np.ndarray  # probs[i, j] = P(m_values[i], n_values[j])
    truncation_loss: float
    config: MeasurementConfig | None = None
    extra: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def value(self, m: int, n: int) -> float:
        i = m - int(self.m_values[0])
        j = n - int(self.n_values[0])
        if 0 <= i < len(self.m_values) and 0 <= j < len(self.n_values):
            return float(self.probs[i, j])
        return 0.0

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {(int(m), int(n)): float(self.probs[i, j])
                for i, m in enumerate(self.m_values)
                for j, n in enumerate(self.n_values)}

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "n", "p"])
            for i, m in enumerate(self.m_values):
                for j, n in enumerate(self.n_values):
                    writer.writerow([int(m), int(n), f"{self.probs[i, j]:.17e}"])

    @classmethod
    def from_dict(cls, values, truncation_loss=0.0, config=None):
        """Build a distribution from a sparse ``{(m, n): p}`` mapping."""
        ms = [m for m, _ in values]
        ns = [n for _, n in values]
        m_values = np.arange(min(ms), max(ms) + 1)
        n_values = np.arange(min(ns), max(ns) + 1)
        probs = np.zeros((len(m_values), len(n_values)))
        for (m, n), p in values.items():
            probs[m - m_values[0], n - n_values[0]] += p
        return cls(m_values, n_values, probs, truncation_loss, config)


def difference_cross_sums(f_plus, f_minus):
    """Cross sums Q[m, k, l] of the photon-number difference n+ - n-.

    ``f_plus`` and ``f_minus`` hold Fock amplitudes with shape (K, cutoff+1).
    Returns ``(m_values, Q)`` with m running from -cutoff_minus to cutoff_plus.
    """
    c_plus = f_plus.shape[1] - 1
    c_minus = f_minus.shape[1] - 1
    m_values = np.arange(-c_minus, c_plus + 1)
    K = f_plus.shape[0]
    q = np.empty((len(m_values), K, K), dtype=complex)
    for i, m in enumerate(m_values):
        if m >= 0:
            length = min(c_minus + 1, c_plus + 1 - m)
            g = f_plus[:, m:m + length] * f_minus[:, :length]
        else:
            length = min(c_plus + 1, c_minus + 1 + m)
            g = f_plus[:, :length] * f_minus[:, -m:-m + length]
        q[i] = g @ g.conj().T
    return m_values, q


def _pmn_at(state: BranchState, net: NetworkConfig, cutoff: FockCutoff, mixture: bool):
    gamma_a, gamma_b, weights = state.branches()
    labels = labels_for(gamma_a, gamma_b, net)
    # Upper bound on each mode's mean photon number over every branch phase,
    # so cutoffs do not depend on where the nodes happen to fall.
    reach_a = (np.max(np.abs(gamma_a)) + net.alpha) ** 2 / 2
    reach_b = (np.max(np.abs(gamma_b)) + net.beta) ** 2 / 2
    cut = tuple(cutoff.for_mean(mean) for mean in (reach_a, reach_a, reach_b, reach_b))

    # ||(1 - Pi) psi|| <= sum_k |w_k| ||(1 - Pi) branch_k||, and the
    # four-mode projector deficit is bounded by the sum of per-mode tails.
    tails = sum(poisson_tail(mean, c) for mean, c in
                zip((reach_a, reach_a, reach_b, reach_b), cut))
    loss_bound = float(np.sum(np.abs(weights)) ** 2 * tails)
    if loss_bound > MAX_TRUNCATION_LOSS:
        raise TruncationTooLossy(
            f"estimated truncation loss {loss_bound:.3g} exceeds {MAX_TRUNCATION_LOSS:g} "
            f"with cutoffs {cut}")

    m_values, q_a = difference_cross_sums(fock_amplitudes(labels.c_plus, cut[0]),
                                          fock_amplitudes(labels.c_minus, cut[1]))
    n_values, q_b = difference_cross_sums(fock_amplitudes(labels.d_plus, cut[2]),
                                          fock_amplitudes(labels.d_minus, cut[3]))
    if mixture:
        p = np.abs(weights) / np.sum(np.abs(weights))
        diag_a = np.real(np.diagonal(q_a, axis1=1, axis2=2))
        diag_b = np.real(np.diagonal(q_b, axis1=1, axis2=2))
        probs = (diag_a * p) @ diag_b.T
    else:
        K = len(weights)
        w = np.outer(weights, np.conj(weights)).reshape(-1)
        probs = np.real((q_a.reshape(len(m_values), K * K) * w) @ q_b.reshape(len(n_values), K * K).T)
    np.clip(probs, 0.0, None, out=probs)
    return m_values, n_values, probs, loss_bound, cut


def joint_pmn(state: BranchState, net: NetworkConfig, cutoff: FockCutoff = FockCutoff(),
              *, mixture=False, check_convergence=True) -> JointNumberDistribution:
    """Joint distribution P(m, n) of the two photon-number differences.

    With ``check_convergence`` the calculation is repeated on a doubled
    branch discretisation and :class:`NonConvergence` is raised if any
    probability moves by more than 1e-6.
    """
    m_values, n_values, probs, loss, cut = _pmn_at(state, net, cutoff, mixture)
    if check_convergence:
        m2, n2, probs2, _, cut2 = _pmn_at(state.refined(), net, cutoff, mixture)
        if cut2 != cut:
            raise NonConvergence("cutoffs changed under branch refinement")
        delta = float(np.max(np.abs(probs2 - probs)))
        if delta > K_CONVERGENCE_TOL:
            raise NonConvergence(f"doubling the branch count moved P(m,n) by {delta:.3g}")
    config = MeasurementConfig(
        state=repr(state), k_points=len(state.branches()[2]), alpha=float(net.alpha),
        beta=float(net.beta), theta=net.theta, phi=net.phi, cutoffs=cut,
        sigma_factor=cutoff.sigma_factor if cutoff.per_mode_max is None else None,
        mixture=mixture)
    return JointNumberDistribution(m_values, n_values, probs, loss, config)


def party_marginal(dist: JointNumberDistribution, party: str) -> dict[int, float]:
    """Marginal distribution of one party's photon-number difference."""
    party = party.upper()
    if party == "A":
        values, probs = dist.m_values, dist.probs.sum(axis=1)
    elif party == "B":
        values, probs = dist.n_values, dist.probs.sum(axis=0)
    else:
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    return {int(v): float(p) for v, p in zip(values, probs)}
