"""Time the cross-sum kernel against a direct sum over four-mode Fock tuples.

    python benchmarks/bench_joint.py
"""

import sys
import time
from pathlib import Path

import numpy as np

from catbell.joint import FockCutoff, joint_pmn
from catbell.state import CatStateSpec, NetworkConfig

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from oracles import direct_tuple_sum  # noqa: E402


def main():
    print(f"{'alpha':>6} {'cutoff':>7} {'kernel s':>10} {'direct s':>10} {'max diff':>10}")
    for alpha in (1.0, 2.0, 3.0, 4.0):
        state, net = CatStateSpec(1.1, 64), NetworkConfig(alpha, alpha, 0.0, -np.pi / 4)
        start = time.perf_counter()
        dist = joint_pmn(state, net, check_convergence=False)
        kernel = time.perf_counter() - start
        cutoff = dist.config.cutoffs[0]
        start = time.perf_counter()
        reference = direct_tuple_sum(state, net, cutoff)
        direct = time.perf_counter() - start
        diff = np.max(np.abs(reference - dist.probs))
        print(f"{alpha:6.1f} {cutoff:7d} {kernel:10.4f} {direct:10.4f} {diff:10.2e}")
    for alpha in (8.0, 16.0):
        start = time.perf_counter()
        joint_pmn(CatStateSpec(1.1, 64), NetworkConfig(alpha, alpha), FockCutoff(), check_convergence=False)
        print(f"{alpha:6.1f} {'':7} {time.perf_counter() - start:10.4f}")


if __name__ == "__main__":
    main()
