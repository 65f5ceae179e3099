"""The large-drive limit: joint quadrature statistics of the microscopic modes.

As alpha, beta grow, the number differences behave like alpha X_theta and
beta X_phi, so P(m, n) approaches P_a(m / alpha, n / beta) / (alpha beta).
Densities live on uniform grids and are integrated with the trapezoid rule.
"""

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import RegularGridInterpolator

from .coherent import coherent_overlap, quadrature_wavefunction
from .errors import DegenerateDeadZone, NonConvergence
from .joint import JointNumberDistribution
from .measurement import ChshResult, bin_table
from .state import BranchState

DENSITY_K_TOL = 1e-8
MAX_GRID_LOSS = 1e-4


class Angles(NamedTuple):
    """Blue and green settings: theta, phi (blue) and theta', phi' (green)."""

    theta: float = 0.0
    phi: float = -np.pi / 4
    theta_p: float = np.pi / 2
    phi_p: float = -3 * np.pi / 4

    def settings(self):
        """(theta, phi) pairs in CHSH order: bb, bg, gb, gg."""
        return [(self.theta, self.phi), (self.theta, self.phi_p),
                (self.theta_p, self.phi), (self.theta_p, self.phi_p)]


@dataclass(frozen=True)
class QuadratureGrid:
    lo: float = -8.0
    hi: float = 8.0
    step: float = 0.02

    @property
    def points(self):
        if self.lo == -self.hi:
            # exact mirror symmetry keeps +-x binned identically
            half = np.linspace(0.0, self.hi, int(round(self.hi / self.step)) + 1)
            return np.concatenate((-half[:0:-1], half))
        count = int(round((self.hi - self.lo) / self.step)) + 1
        return np.linspace(self.lo, self.hi, count)


def trapezoid_weights(points):
    h = np.diff(points)
    w = np.zeros_like(points)
    w[:-1] += h / 2
    w[1:] += h / 2
    return w


@dataclass
class QuadratureDensity:
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # values[i, j] = P_a(x[i], y[j])

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @property
    def dy(self):
        return float(self.y[1] - self.y[0])

    def masses(self):
        """Grid-point probability masses under the trapezoid rule."""
        return trapezoid_weights(self.x)[:, None] * self.values * trapezoid_weights(self.y)[None, :]

    def integral(self) -> float:
        return float(self.masses().sum())

    def marginal(self, party="A"):
        """Marginal density of one party on its own grid."""
        if party.upper() == "A":
            return self.values @ trapezoid_weights(self.y)
        return trapezoid_weights(self.x) @ self.values

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "p"])
            for i, xv in enumerate(self.x):
                for j, yv in enumerate(self.y):
                    writer.writerow([f"{xv:.17e}", f"{yv:.17e}", f"{self.values[i, j]:.17e}"])

    def write_marginal_csv(self, path, party="A"):
        grid = self.x if party.upper() == "A" else self.y
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "p"])
            for xv, p in zip(grid, self.marginal(party)):
                writer.writerow([f"{xv:.17e}", f"{p:.17e}"])


@dataclass(frozen=True)
class DeadZone:
    delta0: float = 0.0
    epsilon: float = 0.0


def _density_at(state: BranchState, theta, phi, x, y):
    gamma_a, gamma_b, weights = state.branches()
    psi_a = quadrature_wavefunction(gamma_a[:, None], theta, x[None, :])
    psi_b = quadrature_wavefunction(gamma_b[:, None], phi, y[None, :])
    amplitude = (weights[:, None] * psi_a).T @ psi_b
    return np.abs(amplitude) ** 2


def quadrature_joint_density(state: BranchState, theta, phi, grid=QuadratureGrid(),
                             *, check_convergence=True) -> QuadratureDensity:
    """Joint density of X_theta on mode a1 and X_phi on mode b1.

    Raises ``ValueError`` when the grid captures less than 1 - 1e-4 of the
    probability.
    """
    x = y = grid.points
    values = _density_at(state, theta, phi, x, y)
    if check_convergence:
        finer = _density_at(state.refined(), theta, phi, x, y)
        delta = float(np.max(np.abs(finer - values)))
        if delta > DENSITY_K_TOL:
            raise NonConvergence(f"doubling the branch count moved the density by {delta:.3g}")
    density = QuadratureDensity(x, y, values)
    missing = 1.0 - density.integral()
    if missing > MAX_GRID_LOSS:
        raise ValueError(f"grid [{grid.lo}, {grid.hi}] misses {missing:.3g} of the probability")
    return density


def converged_state(state: BranchState, theta=0.0, phi=0.0, grid=QuadratureGrid(), max_doublings=6):
    """Refine ``state`` until its quadrature density is stable under doubling."""
    for _ in range(max_doublings + 1):
        try:
            quadrature_joint_density(state, theta, phi, grid)
            return state
        except NonConvergence:
            state = state.refined()
    raise NonConvergence("quadrature density did not stabilise")


def reduced_quadrature_density(state: BranchState, angle, x, party="A"):
    """Single-mode quadrature density of one party's reduced state."""
    gamma_a, gamma_b, weights = state.branches()
    own, other = (gamma_a, gamma_b) if party.upper() == "A" else (gamma_b, gamma_a)
    # rho = sum_kl w_k conj(w_l) <other_l|other_k> |own_k><own_l|
    coupling = np.outer(weights, np.conj(weights)) * coherent_overlap(other[None, :], other[:, None])
    psi = quadrature_wavefunction(own[:, None], angle, np.asarray(x)[None, :])
    return np.real(np.einsum("kl,kx,lx->x", coupling, psi, np.conj(psi)))


def _sign_outcomes(points, delta0):
    return np.where(np.abs(points) < delta0, 0, np.sign(points)).astype(int)


def bin_density(density: QuadratureDensity, delta0=0.0):
    return bin_table(density.masses(), _sign_outcomes(density.x, delta0),
                     _sign_outcomes(density.y, delta0))


def asymptotic_chsh(state: BranchState, angles=Angles(), dead_zone=DeadZone(),
                    grid=QuadratureGrid(), *, check_convergence=True) -> ChshResult:
    """CHSH value in the large-drive limit with sign binning and a dead zone."""
    stats = []
    for theta, phi in angles.settings():
        density = quadrature_joint_density(state, theta, phi, grid, check_convergence=check_convergence)
        stats.append(bin_density(density, dead_zone.delta0))
    return ChshResult.from_binned(stats)


def zero_probability(density: QuadratureDensity, delta0, party="A") -> float:
    """Mass with |quadrature| < delta0 under the grid rule used for binning."""
    grid = density.x if party.upper() == "A" else density.y
    mass = density.marginal(party) * trapezoid_weights(grid)
    return float(mass[np.abs(grid) < delta0].sum())


def solve_delta0(density: QuadratureDensity, epsilon: float, party="A") -> DeadZone:
    """Largest dead zone with P(|x| < delta0) <= epsilon.

    Candidates sit on cell edges |x_j| + h/2, so the grid points counted as
    outcome 0 tile exactly the interval (-delta0, delta0).
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    grid = density.x if party.upper() == "A" else density.y
    step = float(grid[1] - grid[0])
    mass = density.marginal(party) * trapezoid_weights(grid)
    radius = np.abs(grid)
    order = np.argsort(radius, kind="stable")
    radius, mass = radius[order], mass[order]
    breaks, first = np.unique(radius, return_index=True)
    inclusive = np.cumsum(mass)[np.append(first[1:], len(mass)) - 1]
    candidates = np.concatenate(([0.0], breaks + step / 2))
    p_zero = np.concatenate(([0.0], inclusive))
    ok = p_zero <= epsilon
    return DeadZone(float(candidates[ok].max()), float(epsilon))


def required_alpha(n0: int, dead_zone: DeadZone) -> float:
    """Smallest drive amplitude with n0 = alpha * delta0."""
    if n0 < 0:
        raise ValueError("threshold must be nonnegative")
    if n0 == 0:
        return 0.0
    if dead_zone.delta0 <= 0:
        raise DegenerateDeadZone("delta0 = 0 cannot accommodate a positive threshold")
    return n0 / dead_zone.delta0


def discretize_density(density: QuadratureDensity, m_values, n_values, alpha, beta):
    """Density mass in lattice cells [(m - 1/2)/alpha, (m + 1/2)/alpha) x (same for n)."""
    cum = cumulative_trapezoid(density.values, density.x, axis=0, initial=0)
    cum = cumulative_trapezoid(cum, density.y, axis=1, initial=0)
    cdf = RegularGridInterpolator((density.x, density.y), cum)
    ex = np.clip((np.append(m_values, m_values[-1] + 1) - 0.5) / alpha, density.x[0], density.x[-1])
    ey = np.clip((np.append(n_values, n_values[-1] + 1) - 0.5) / beta, density.y[0], density.y[-1])
    gx, gy = np.meshgrid(ex, ey, indexing="ij")
    corners = cdf(np.stack([gx.ravel(), gy.ravel()], axis=-1)).reshape(gx.shape)
    return corners[1:, 1:] - corners[:-1, 1:] - corners[1:, :-1] + corners[:-1, :-1]


def convergence_to_asymptote(finite: JointNumberDistribution, density: QuadratureDensity,
                             alpha=None, beta=None) -> float:
    """Total-variation distance between P(m, n) and the rescaled limit density."""
    alpha = finite.config.alpha if alpha is None else alpha
    beta = finite.config.beta if beta is None else beta
    cells = discretize_density(density, finite.m_values, finite.n_values, alpha, beta)
    outside = max(density.integral() - float(cells.sum()), 0.0)
    return 0.5 * (float(np.abs(finite.probs - cells).sum()) + outside)


def density_as_distribution(density: QuadratureDensity, alpha, beta, span=None):
    """Lattice distribution holding the density's cell masses at drive (alpha, beta)."""
    half_m = int(np.ceil(alpha * density.x[-1])) if span is None else span
    half_n = int(np.ceil(beta * density.y[-1])) if span is None else span
    m_values = np.arange(-half_m, half_m + 1)
    n_values = np.arange(-half_n, half_n + 1)
    cells = discretize_density(density, m_values, n_values, alpha, beta)
    return JointNumberDistribution(m_values, n_values, cells, 0.0)
