"""Three-region outcome binning and the CHSH combination."""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentConfigs
from .joint import JointNumberDistribution

OUTCOMES = (-1, 0, 1)
SETTINGS = ("bb", "bg", "gb", "gg")


def outcome(values, n0):
    """+1 above n0, -1 below -n0, 0 in between (inclusive)."""
    values = np.asarray(values)
    return np.where(values > n0, 1, np.where(values < -n0, -1, 0))


@dataclass(frozen=True)
class BinnedStatistics:
    table: np.ndarray  # table[i, j] for outcomes OUTCOMES[i] at A, OUTCOMES[j] at B
    p_zero_a: float
    p_zero_b: float
    correlation: float
    correlation_renormalized: float

    def p(self, a: int, b: int) -> float:
        return float(self.table[a + 1, b + 1])

    def outcome_probabilities(self, party: str):
        """(P(-1), P(0), P(+1)) for one party."""
        axis = 1 if party.upper() == "A" else 0
        return tuple(float(v) for v in self.table.sum(axis=axis))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["outcome_a", "outcome_b", "p"])
            for i, a in enumerate(OUTCOMES):
                for j, b in enumerate(OUTCOMES):
                    writer.writerow([a, b, f"{self.table[i, j]:.17e}"])


def bin_table(prob_matrix, outcomes_a, outcomes_b) -> BinnedStatistics:
    """Aggregate a probability matrix by per-axis outcome labels in {-1, 0, 1}."""
    sel_a = np.stack([outcomes_a == o for o in OUTCOMES]).astype(float)
    sel_b = np.stack([outcomes_b == o for o in OUTCOMES]).astype(float)
    table = sel_a @ prob_matrix @ sel_b.T
    values = np.array(OUTCOMES, dtype=float)
    corr = float(values @ table @ values)
    decided = table[0, 0] + table[0, 2] + table[2, 0] + table[2, 2]
    renorm = corr / decided if decided > 0 else 0.0
    return BinnedStatistics(table, float(table[1].sum()), float(table[:, 1].sum()), corr, renorm)


def bin_distribution(dist: JointNumberDistribution, n0: int) -> BinnedStatistics:
    """Bin P(m, n) into outcomes with threshold ``n0``.

    The middle outcome counts as 0 in the correlation, so it can only dilute
    it; ``correlation_renormalized`` conditions on both outcomes being +-1.
    """
    if n0 < 0:
        raise ValueError("threshold must be nonnegative")
    return bin_table(dist.probs, outcome(dist.m_values, n0), outcome(dist.n_values, n0))


@dataclass(frozen=True)
class ChshResult:
    e_bb: float
    e_bg: float
    e_gb: float
    e_gg: float
    e_value: float
    p_zero_max: float
    e_renormalized: float = float("nan")

    @classmethod
    def from_binned(cls, stats):
        bb, bg, gb, gg = stats
        e = bb.correlation - bg.correlation + gb.correlation + gg.correlation
        e_r = (bb.correlation_renormalized - bg.correlation_renormalized
               + gb.correlation_renormalized + gg.correlation_renormalized)
        p_zero = max(max(s.p_zero_a, s.p_zero_b) for s in stats)
        return cls(bb.correlation, bg.correlation, gb.correlation, gg.correlation, e, p_zero, float(e_r))

    @property
    def correlations(self):
        return dict(zip(SETTINGS, (self.e_bb, self.e_bg, self.e_gb, self.e_gg)))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["setting", "e"])
            for name, value in self.correlations.items():
                writer.writerow([name, f"{value:.17e}"])
            writer.writerow(["chsh", f"{self.e_value:.17e}"])


def chsh(dists, n0: int) -> ChshResult:
    """CHSH value from distributions at settings (th,ph), (th,ph'), (th',ph), (th',ph')."""
    dists = list(dists)
    if len(dists) != 4:
        raise ValueError("need exactly four distributions")
    configs = [d.config for d in dists]
    if any(c is not None for c in configs):
        if any(c is None for c in configs):
            raise InconsistentConfigs("some distributions carry no configuration")
        reference = configs[0].without_angles()
        for c in configs[1:]:
            if c.without_angles() != reference:
                raise InconsistentConfigs("distributions differ in more than their angles")
    return ChshResult.from_binned([bin_distribution(d, n0) for d in dists])
