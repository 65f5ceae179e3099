"""Command-line front end: scans, asymptotic limit, hidden-variable bound, exports."""

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import asymptotic as asym
from .config import ConfigError, RunConfig, load_config, parse_angle
from .errors import CatBellError, NonConvergence, TruncationTooLossy
from .joint import FockCutoff, joint_pmn
from .lhv import all_assignments, chsh_of_assignment, mixture_bound
from .measurement import SETTINGS, ChshResult, bin_distribution
from .state import CatStateSpec, NetworkConfig

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
NUMERICAL_ERRORS = (NonConvergence, TruncationTooLossy)
SCAN_COLUMNS = ["alpha", "n0", "e_bb", "e_bg", "e_gb", "e_gg", "e", "p_zero_max",
                "truncation_loss", "status"]


def _fmt(value):
    return f"{value:.17e}" if isinstance(value, float) else value


def _ordered_map(fn, tasks, workers):
    """Map preserving input order; a process pool when workers > 1."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _distribution_task(task):
    r0, k_points, sigma_factor, alpha, theta, phi, mixture = task
    try:
        return joint_pmn(CatStateSpec(r0, k_points), NetworkConfig(alpha, alpha, theta, phi),
                         FockCutoff(sigma_factor=sigma_factor), mixture=mixture)
    except NUMERICAL_ERRORS as exc:
        return exc


def _settings(config: RunConfig):
    return asym.Angles(*config.angles).settings()


def scan_rows(config: RunConfig, mixture=False):
    """Rows of the alpha scan, in input order; failures carry a status message."""
    tasks = [(config.r0, config.k_points, config.sigma_factor, alpha, theta, phi, mixture)
             for alpha in config.alphas for theta, phi in _settings(config)]
    results = _ordered_map(_distribution_task, tasks, config.workers)
    rows = []
    for i, alpha in enumerate(config.alphas):
        dists = results[4 * i:4 * i + 4]
        failure = next((d for d in dists if isinstance(d, Exception)), None)
        for n0 in config.thresholds(alpha):
            if failure is not None:
                rows.append([float(alpha), n0] + [math.nan] * 7
                            + [f"{type(failure).__name__}: {failure}"])
                continue
            result = ChshResult.from_binned([bin_distribution(d, n0) for d in dists])
            loss = max(d.truncation_loss for d in dists)
            rows.append([float(alpha), n0, result.e_bb, result.e_bg, result.e_gb, result.e_gg,
                         result.e_value, result.p_zero_max, loss, "ok"])
    return rows


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def cmd_scan_alpha(config: RunConfig, args) -> int:
    rows = scan_rows(config, mixture=args.mixture)
    out = Path(config.output_dir) / "scan.csv"
    _write_rows(out, SCAN_COLUMNS, rows)
    failed = [r for r in rows if r[-1] != "ok"]
    for r in rows:
        if r[-1] == "ok":
            print(f"alpha={r[0]:g} n0={r[1]} E={r[6]:.6f} p0max={r[7]:.4f}")
    if failed:
        print(f"error: {failed[0][-1]}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def asymptotic_report(config: RunConfig):
    """Sign-binned and dead-zone CHSH values in the large-drive limit."""
    state = asym.converged_state(CatStateSpec(config.r0, config.k_points))
    densities = [asym.quadrature_joint_density(state, th, ph) for th, ph in _settings(config)]
    sign = ChshResult.from_binned([asym.bin_density(d) for d in densities])
    # one dead zone that keeps P(0) <= epsilon for every setting and party
    delta0 = min(asym.solve_delta0(d, config.epsilon, party).delta0
                 for d in densities for party in "AB")
    dead_zone = asym.DeadZone(delta0, config.epsilon)
    binned = [asym.bin_density(d, delta0) for d in densities]
    return state, densities, sign, dead_zone, binned


def cmd_asymptotic(config: RunConfig, args) -> int:
    state, densities, sign, dead_zone, binned = asymptotic_report(config)
    zoned = ChshResult.from_binned(binned)
    out = Path(config.output_dir)
    sign.write_csv(out / "asymptotic_chsh.csv")
    _write_rows(out / "asymptotic_summary.csv",
                ["r0", "k_points", "delta0", "epsilon", "e", "e_bb", "e_bg", "e_gb", "e_gg",
                 "p_zero_max"],
                [[config.r0, state.k_points, 0.0, 0.0, sign.e_value, sign.e_bb, sign.e_bg,
                  sign.e_gb, sign.e_gg, sign.p_zero_max],
                 [config.r0, state.k_points, dead_zone.delta0, dead_zone.epsilon, zoned.e_value,
                  zoned.e_bb, zoned.e_bg, zoned.e_gb, zoned.e_gg, zoned.p_zero_max]])
    rows = []
    for name, stats in zip(SETTINGS, binned):
        for party in "AB":
            p_minus, p_zero, p_plus = stats.outcome_probabilities(party)
            rows.append([name, party, dead_zone.delta0, p_minus, p_zero, p_plus])
    _write_rows(out / "asymptotic_outcomes.csv",
                ["setting", "party", "delta0", "p_minus", "p_zero", "p_plus"], rows)
    densities[0].write_marginal_csv(out / "asymptotic_marginal_a.csv", "A")
    if args.density:
        for name, density in zip(SETTINGS, densities):
            density.write_csv(out / f"asymptotic_density_{name}.csv")
    print(f"E(asymptotic, sign binning) = {sign.e_value:.6f}")
    print(f"delta0 = {dead_zone.delta0:.4f} for epsilon = {dead_zone.epsilon:g}: "
          f"E = {zoned.e_value:.6f}, max P(0) = {zoned.p_zero_max:.4g}")
    return EXIT_OK


def cmd_lhv(config: RunConfig, args) -> int:
    out = Path(config.output_dir)
    rows = [list(a) + [chsh_of_assignment(a)] for a in all_assignments()]
    _write_rows(out / "lhv_assignments.csv",
                ["lambda_blue_a", "lambda_green_a", "lambda_blue_b", "lambda_green_b", "value"], rows)
    values = [r[-1] for r in rows]
    print(f"deterministic assignments: min {min(values)}, max {max(values)}")
    mixtures = out / "lhv_mixtures.csv"
    if config.samples > 0:
        lo, hi = mixture_bound(config.samples, config.seed)
        _write_rows(mixtures, ["seed", "samples", "min", "max"], [[config.seed, config.samples, lo, hi]])
        print(f"{config.samples} random mixtures (seed {config.seed}): min {lo:.12f}, max {hi:.12f}")
    elif mixtures.exists():
        mixtures.unlink()
    return EXIT_OK


def cmd_convergence(config: RunConfig, args) -> int:
    out = Path(config.output_dir)
    theta, phi = _settings(config)[0]
    state = CatStateSpec(config.r0, config.k_points)
    density = asym.quadrature_joint_density(state, theta, phi)
    tasks = [(config.r0, config.k_points, config.sigma_factor, alpha, theta, phi, False)
             for alpha in config.alphas]
    rows, status = [], EXIT_OK
    for alpha, dist in zip(config.alphas, _ordered_map(_distribution_task, tasks, config.workers)):
        if isinstance(dist, Exception):
            print(f"error: alpha={alpha:g}: {type(dist).__name__}: {dist}", file=sys.stderr)
            rows.append([float(alpha), math.nan])
            status = EXIT_NUMERICAL
            continue
        distance = asym.convergence_to_asymptote(dist, density)
        rows.append([float(alpha), distance])
        cells = asym.discretize_density(density, dist.m_values, dist.n_values, alpha, alpha)
        with open(out / f"rescaled_alpha_{alpha:g}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "y", "p_finite", "p_asymptote"])
            for i, m in enumerate(dist.m_values):
                for j, n in enumerate(dist.n_values):
                    writer.writerow([_fmt(m / alpha), _fmt(n / alpha), _fmt(float(dist.probs[i, j])),
                                     _fmt(float(cells[i, j]))])
        print(f"alpha={alpha:g} total-variation distance {distance:.6g}")
    if args.self_test:
        reference = asym.density_as_distribution(density, 4.0, 4.0)
        distance = asym.convergence_to_asymptote(reference, density, 4.0, 4.0)
        rows.append(["self-test", distance])
        print(f"self-test distance {distance:.3g}")
    _write_rows(out / "convergence.csv", ["alpha", "tv_distance"], rows)
    return status


def cmd_pmn(config: RunConfig, args) -> int:
    alpha = config.alphas[0] if config.alphas else 2.0
    theta, phi = dict(zip(SETTINGS, _settings(config)))[args.setting]
    dist = joint_pmn(CatStateSpec(config.r0, config.k_points), NetworkConfig(alpha, alpha, theta, phi),
                     FockCutoff(sigma_factor=config.sigma_factor), mixture=args.mixture)
    path = Path(config.output_dir) / "pmn.csv"
    dist.write_csv(path)
    print(f"wrote {path}: sum P = {dist.total:.12f}, truncation loss bound {dist.truncation_loss:.3g}")
    return EXIT_OK


COMMANDS = {
    "scan-alpha": cmd_scan_alpha,
    "asymptotic": cmd_asymptotic,
    "lhv": cmd_lhv,
    "convergence": cmd_convergence,
    "pmn": cmd_pmn,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--r0", type=float)
    common.add_argument("--alpha", type=float, action="append", dest="alphas",
                        help="drive amplitude alpha = beta (repeatable)")
    common.add_argument("--angles", help="theta,phi,theta',phi' in radians; 'pi/4' style allowed")
    common.add_argument("--n0", type=int, action="append", dest="n0_list",
                        help="photon threshold (repeatable)")
    common.add_argument("--k-points", type=int)
    common.add_argument("--sigma-factor", type=float)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--out", dest="output_dir")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(prog="catbell", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    scan = sub.add_parser("scan-alpha", parents=[common], help="CHSH value versus alpha = beta")
    scan.add_argument("--mixture", action="store_true", help="classical mixture of branches")
    dens = sub.add_parser("asymptotic", parents=[common], help="large-drive limit")
    dens.add_argument("--density", action="store_true", help="also export joint densities")
    lhv = sub.add_parser("lhv", parents=[common], help="hidden-variable bound")
    lhv.add_argument("--samples", type=int)
    conv = sub.add_parser("convergence", parents=[common], help="distance to the asymptotic shape")
    conv.add_argument("--self-test", action="store_true")
    pmn = sub.add_parser("pmn", parents=[common], help="dump one P(m, n)")
    pmn.add_argument("--setting", choices=SETTINGS, default="bb")
    pmn.add_argument("--mixture", action="store_true")
    return parser


def resolve_config(args) -> RunConfig:
    config = load_config(args.config) if args.config else RunConfig()
    angles = None
    if args.angles is not None:
        angles = tuple(parse_angle(a) for a in args.angles.split(","))
    return config.updated(
        r0=args.r0,
        alphas=tuple(args.alphas) if args.alphas else None,
        angles=angles,
        n0_list=tuple(args.n0_list) if args.n0_list else None,
        k_points=args.k_points,
        sigma_factor=args.sigma_factor,
        epsilon=args.epsilon,
        output_dir=args.output_dir,
        seed=args.seed,
        workers=args.workers,
        samples=getattr(args, "samples", None),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        Path(config.output_dir).mkdir(parents=True, exist_ok=True)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](config, args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CatBellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
