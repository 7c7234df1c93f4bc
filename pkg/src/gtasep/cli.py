"""Command-line interface.

Subcommands
-----------
simulate      kinetic Monte Carlo ensemble -> observable report + tables
exact         exact finite-size Z, J, Delta over an (M, N) grid
bethe         current-cumulant series, cumulants, parametric curve
asymptotics   thermodynamic/crossover datasets (see ``dataset`` choices)
sample        exact stationary sampler statistics vs transfer-matrix values
validate      cross-validation suite, JSON report, nonzero exit on failure

Common flags: ``--config PATH`` (key=value lines), ``--set key=value``
(repeatable overrides), ``--seed``, ``--out DIR``, ``--threads``,
``--format {csv,json}``, ``--plot/--no-plot``.

Exit codes: 0 success, 1 validation failure, 2 usage/config error,
3 resource-cap error.

CSV schemas (header row in every file):
  simulate_trace.csv        step, y_total, increment
  simulate_cluster_hist.csv size, probability
  simulate_occ_hist.csv     occupation, probability
  simulate_two_point.csv    lag, covariance, stderr
  simulate_hop_hist.csv     jumps, probability
  exact_table.csv           M, N, nu, Z, Z_float, J, J_float, Delta, Delta_float
                            (rational columns as "num/den" strings)
  exact_occupation.csv      n, P_exact, P_exact_float, P_saddle
  bethe_series.csv          n, lambda_coeff, gamma_coeff (+ float columns)
  bethe_cumulants.csv       order, cumulant, cumulant_float
  bethe_parametric.csv      B, gamma, ln_lambda, gamma_err, ln_lambda_err
  asymptotics_r_theta.csv   theta, R, c2, c3, c4
  asymptotics_constants.csv p, mu, c, z_minus, z_plus, j_inf, correction, a, b,
                            z_star, xi, amplitude, lambda_tilde, n_star
  asymptotics_flow.csv      c, then one column per parameter pair
  asymptotics_ldf.csv       z, G  /  x, G_hat (two files)
  asymptotics_gtheta.csv    theta, b_param, t, G_theta
  asymptotics_correlations.csv lag, covariance
  transition_cluster.csv    n, P_mid / chi, density (two files)
  sample_cov.csv            lag, covariance, stderr, exact
  sample_summary.csv        quantity, value, stderr, exact
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, asymptotics, bethe, exact, simulate, special, transition
from .errors import GtasepError, ResourceCapError
from .model import Geometry, derive_params
from .reporting import (
    apply_overrides,
    frac_str,
    parse_config,
    write_csv,
    write_json,
    write_metadata,
)

USAGE_ERROR, VALIDATION_FAILURE, RESOURCE_ERROR = 2, 1, 3


def _write_table(out: Path, name: str, header, rows, fmt: str, outputs: list):
    if fmt == "json":
        path = out / f"{name}.json"
        write_json(path, {"columns": list(header),
                          "rows": [list(r) for r in rows]})
    else:
        path = write_csv(out / f"{name}.csv", header, rows)
    outputs.append(str(path))
    return path


def _params_from_config(cfg: dict):
    p = cfg.get("p", Fraction(1, 2))
    mu = cfg.get("mu", Fraction(1, 2))
    return derive_params(p, mu)


def _maybe_plot(args, fn, *fn_args) -> None:
    if not args.plot:
        return
    fn(*fn_args)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_simulate(args, cfg: dict, out: Path) -> int:
    from . import _kernels

    params = _params_from_config(cfg)
    geom = Geometry(M=int(cfg.get("M", 50)), N=int(cfg.get("L", 100)) - int(cfg.get("M", 50)))
    steps = int(cfg.get("steps", 100_000))
    replicas = int(cfg.get("replicas", 4))
    warmup = int(cfg.get("warmup", max(1000, geom.L)))
    thin = int(cfg.get("thin", 100))
    lags_cfg = cfg.get("lags", [1, 2, 4, 8, 16, 32])
    lags = tuple(int(k) for k in (lags_cfg if isinstance(lags_cfg, list) else [lags_cfg]))
    report = simulate.run_ensemble(
        geom, params, steps=steps, replicas=replicas, warmup=warmup,
        seed=args.seed, lags=lags, thin=thin,
        batches=int(cfg.get("batches", 32)), threads=args.threads,
    )
    outputs: list[str] = []
    rep_path = out / "simulate_report.json"
    write_json(rep_path, report.to_jsonable())
    outputs.append(str(rep_path))

    # short single-replica trace of the jump-count time series
    trace_steps = int(cfg.get("trace_steps", 5000))
    state = simulate.evenly_spread_ring(geom.L, geom.M)
    rng = _kernels.init_rng(np.uint64(simulate.replica_seed(args.seed, replicas)))
    rows = []
    for t in range(trace_steps):
        _, jumps = simulate.step_gtasep(state, params, rng)
        rows.append((t + 1, state.y_total, jumps))
    _write_table(out, "simulate_trace", ["step", "y_total", "increment"], rows,
                 args.format, outputs)

    _write_table(out, "simulate_cluster_hist", ["size", "probability"],
                 [(n, report.cluster_hist[n]) for n in range(1, geom.M + 1)
                  if report.cluster_hist[n] > 0], args.format, outputs)
    _write_table(out, "simulate_occ_hist", ["occupation", "probability"],
                 [(n, report.occ_hist[n]) for n in range(geom.M + 1)
                  if report.occ_hist[n] > 0], args.format, outputs)
    _write_table(out, "simulate_two_point", ["lag", "covariance", "stderr"],
                 [(k, v[0], v[1]) for k, v in report.two_point.items()],
                 args.format, outputs)
    _write_table(out, "simulate_hop_hist", ["jumps", "probability"],
                 [(k, report.hop_hist[k]) for k in range(geom.M + 1)
                  if report.hop_hist[k] > 0], args.format, outputs)

    if args.plot:
        from . import plotting

        c = geom.M / geom.L
        z_minus = None
        if float(params.nu) < 1 and 0 < c < 1:
            z_minus, _ = asymptotics.saddle_points(params, c)
        plotting.plot_cluster_hist(report.cluster_hist, z_minus,
                                   out / "simulate_cluster_hist.png")
        outputs.append(str(out / "simulate_cluster_hist.png"))

    j_exact = None
    if geom.M >= 1 and params.is_exact:
        j_exact = float(exact.mean_jumps(geom.M, geom.N, params))
    summary = {
        "j_hat": report.j_hat, "j_stderr": report.j_stderr, "j_exact": j_exact,
        "delta_hat": report.delta_hat, "delta_stderr": report.delta_stderr,
    }
    write_metadata(out / "metadata.json", "simulate",
                   {**cfg, "summary": summary}, args.seed, outputs)
    print(f"simulate: j_hat = {report.j_hat:.6f} +- {report.j_stderr:.2g}"
          + (f" (exact {j_exact:.6f})" if j_exact is not None else ""))
    return 0


def cmd_exact(args, cfg: dict, out: Path) -> int:
    params = _params_from_config(cfg)
    if not params.is_exact:
        raise GtasepError("exact tables need rational p and mu (e.g. p=1/2)")
    m_list = cfg.get("M_list", [2, 3, 4, 5, 6])
    n_list = cfg.get("N_list", m_list)
    m_list = m_list if isinstance(m_list, list) else [m_list]
    n_list = n_list if isinstance(n_list, list) else [n_list]
    rows = []
    for M, N in zip(m_list, n_list):
        M, N = int(M), int(N)
        z = exact.partition_function(M, N, params.nu)
        j = exact.mean_jumps(M, N, params)
        delta = exact.diffusion_exact(M, N, params)
        rows.append((M, N, frac_str(params.nu), frac_str(z), float(z),
                     frac_str(j), float(j), frac_str(delta), float(delta)))
    outputs: list[str] = []
    _write_table(out, "exact_table",
                 ["M", "N", "nu", "Z", "Z_float", "J", "J_float", "Delta", "Delta_float"],
                 rows, args.format, outputs)

    M_big, N_big = int(m_list[-1]), int(n_list[-1])
    dist = exact.occupation_distribution(M_big, N_big, params.nu)
    c = M_big / (M_big + N_big)
    occ_rows = []
    for n, prob in enumerate(dist):
        saddle = (asymptotics.occupation_saddle(n, params, c)
                  if 0 < c < 1 and float(params.nu) < 1 else math.nan)
        occ_rows.append((n, frac_str(prob), float(prob), saddle))
    _write_table(out, "exact_occupation", ["n", "P_exact", "P_exact_float", "P_saddle"],
                 occ_rows, args.format, outputs)
    if args.plot:
        from . import plotting

        ns = list(range(len(dist)))
        plotting.plot_occupation(ns, [float(x) for x in dist],
                                 [r[3] for r in occ_rows], "saddle form",
                                 out / "exact_occupation.png")
        outputs.append(str(out / "exact_occupation.png"))
    write_metadata(out / "metadata.json", "exact", cfg, args.seed, outputs)
    print(f"exact: wrote {len(rows)} geometry rows")
    return 0


def cmd_bethe(args, cfg: dict, out: Path) -> int:
    params = _params_from_config(cfg)
    M, N = int(cfg.get("M", 3)), int(cfg.get("N", 3))
    n_max = int(cfg.get("n_max", 6))
    order = int(cfg.get("order", min(4, n_max)))
    series = bethe.series_coeffs(M, N, params, n_max=n_max)
    cums = bethe.cumulants_from_series(series, order)
    outputs: list[str] = []
    _write_table(out, "bethe_series",
                 ["n", "lambda_coeff", "lambda_coeff_float", "gamma_coeff",
                  "gamma_coeff_float"],
                 [(n, frac_str(series.lambda_coeffs[n]), float(series.lambda_coeffs[n]),
                   frac_str(series.gamma_coeffs[n]), float(series.gamma_coeffs[n]))
                  for n in range(1, n_max + 1)], args.format, outputs)
    _write_table(out, "bethe_cumulants", ["order", "cumulant", "cumulant_float"],
                 [(n + 1, frac_str(cv), float(cv)) for n, cv in enumerate(cums)],
                 args.format, outputs)
    b_grid_cfg = cfg.get("B_grid")
    if b_grid_cfg is not None:
        b_values = [float(b) for b in (b_grid_cfg if isinstance(b_grid_cfg, list)
                                       else [b_grid_cfg])]
        rows = []
        for b_val in b_values:
            gamma, ln_lambda, g_err, l_err = bethe.cgf_parametric(series, b_val)
            rows.append((b_val, gamma, ln_lambda, g_err, l_err))
        _write_table(out, "bethe_parametric",
                     ["B", "gamma", "ln_lambda", "gamma_err", "ln_lambda_err"],
                     rows, args.format, outputs)
    write_metadata(out / "metadata.json", "bethe", cfg, args.seed, outputs)
    print(f"bethe: c1..c{order} = " + ", ".join(f"{float(cv):.6g}" for cv in cums))
    return 0


def _theta_grid(cfg: dict) -> list[float]:
    grid = cfg.get("theta_grid")
    if grid is not None:
        return [float(t) for t in (grid if isinstance(grid, list) else [grid])]
    lo, hi, count = (float(cfg.get("theta_min", 0.05)),
                     float(cfg.get("theta_max", 500.0)),
                     int(cfg.get("theta_count", 40)))
    step = (math.log(hi) - math.log(lo)) / (count - 1)
    return [math.exp(math.log(lo) + i * step) for i in range(count)]


def cmd_asymptotics(args, cfg: dict, out: Path) -> int:
    outputs: list[str] = []
    dataset = args.dataset
    if dataset == "r-theta":
        thetas = _theta_grid(cfg)
        rows = []
        for theta in thetas:
            c1, c2, c3, c4 = transition.transition_cumulants(theta, order=4)
            rows.append((theta, c3 * c3 / (c2 * c4), c2, c3, c4))
        _write_table(out, "asymptotics_r_theta", ["theta", "R", "c2", "c3", "c4"],
                     rows, args.format, outputs)
        # extrema locations of the rescaled cumulants (derived outputs: the
        # curves have interior extrema whose positions are not tabulated
        # anywhere; recorded here from the computed grid)
        extrema = {}
        for idx, name in ((3, "c3_min_theta"), (4, "c4_max_theta")):
            vals = [r[idx] for r in rows]
            pick = min if idx == 3 else max
            extrema[name] = thetas[vals.index(pick(vals))]
        if args.plot:
            from . import plotting

            plotting.plot_r_theta(thetas, [r[1] for r in rows],
                                  transition.KPZ_CUMULANT_RATIO,
                                  out / "asymptotics_r_theta.png")
            plotting.plot_rescaled_cumulants(
                thetas, {2: [r[2] for r in rows], 3: [r[3] for r in rows],
                         4: [r[4] for r in rows]},
                out / "asymptotics_rescaled_cumulants.png")
            outputs += [str(out / "asymptotics_r_theta.png"),
                        str(out / "asymptotics_rescaled_cumulants.png")]
        write_metadata(out / "metadata.json", "asymptotics r-theta",
                       {**cfg, "extrema": extrema}, args.seed, outputs)
        print(f"asymptotics r-theta: {len(rows)} rows, "
              f"R({rows[-1][0]:.3g}) = {rows[-1][1]:.5f}")
        return 0

    if dataset == "constants":
        p_list = cfg.get("p_list", [0.25, 0.5, 0.75])
        mu_list = cfg.get("mu_list", [0.0, 0.5, 0.9])
        c_list = cfg.get("c_list", [0.25, 0.5, 0.75])
        rows = []
        for p in (p_list if isinstance(p_list, list) else [p_list]):
            for mu in (mu_list if isinstance(mu_list, list) else [mu_list]):
                for c in (c_list if isinstance(c_list, list) else [c_list]):
                    params = derive_params(float(p), float(mu))
                    b = asymptotics.scaling_constants(params, float(c))
                    rows.append((float(p), float(mu), float(c), b.z_minus, b.z_plus,
                                 b.j_inf, b.correction, b.a, b.b, b.z_star, b.xi,
                                 b.amplitude, b.lambda_tilde, b.n_star))
        _write_table(out, "asymptotics_constants",
                     ["p", "mu", "c", "z_minus", "z_plus", "j_inf", "correction",
                      "a", "b", "z_star", "xi", "amplitude", "lambda_tilde", "n_star"],
                     rows, args.format, outputs)
        write_metadata(out / "metadata.json", "asymptotics constants", cfg, args.seed,
                       outputs)
        print(f"asymptotics constants: {len(rows)} rows")
        return 0

    if dataset == "flow":
        pairs_cfg = cfg.get("pairs", ["0.5:0.0", "0.5:0.5", "0.5:0.9", "0.5:1.0"])
        pairs = []
        for item in (pairs_cfg if isinstance(pairs_cfg, list) else [pairs_cfg]):
            p_str, _, mu_str = str(item).partition(":")
            pairs.append((float(p_str), float(mu_str)))
        count = int(cfg.get("c_count", 99))
        c_grid = [(i + 1) / (count + 1) for i in range(count)]
        curves = {}
        for p, mu in pairs:
            params = derive_params(p, mu)
            curves[f"p={p},mu={mu}"] = [asymptotics.flow_diagram(params, c)
                                        for c in c_grid]
        header = ["c"] + list(curves)
        rows = [[c] + [curves[k][i] for k in curves] for i, c in enumerate(c_grid)]
        _write_table(out, "asymptotics_flow", header, rows, args.format, outputs)
        if args.plot:
            from . import plotting

            plotting.plot_flow_diagram(c_grid, curves, out / "asymptotics_flow.png")
            outputs.append(str(out / "asymptotics_flow.png"))
        write_metadata(out / "metadata.json", "asymptotics flow", cfg, args.seed, outputs)
        print(f"asymptotics flow: {len(pairs)} parameter pairs")
        return 0

    if dataset == "ldf":
        z_lo = float(cfg.get("z_min", -2.2))
        z_hi = float(cfg.get("z_max", 4.0))
        count = int(cfg.get("z_count", 60))
        zs = [z_lo + (z_hi - z_lo) * i / (count - 1) for i in range(count)]
        gs = [special.dl_function(z) for z in zs]
        xs = [0.2 + 2.4 * i / (count - 1) for i in range(count)]
        ghats = [special.legendre_dl(x) for x in xs]
        _write_table(out, "asymptotics_ldf_g", ["z", "G"], list(zip(zs, gs)),
                     args.format, outputs)
        _write_table(out, "asymptotics_ldf_ghat", ["x", "G_hat"], list(zip(xs, ghats)),
                     args.format, outputs)
        theta_list = cfg.get("thetas", [4.0, 40.0, 400.0])
        rows = []
        for theta in (theta_list if isinstance(theta_list, list) else [theta_list]):
            for i in range(41):
                b_param = -0.95 + 1.9 * i / 40
                t_val, g_val = transition.transition_cgf(float(theta), b_param)
                rows.append((float(theta), b_param, t_val, g_val))
        _write_table(out, "asymptotics_gtheta", ["theta", "b_param", "t", "G_theta"],
                     rows, args.format, outputs)
        if args.plot:
            from . import plotting

            plotting.plot_ldf(zs, gs, xs, ghats, out / "asymptotics_ldf.png")
            outputs.append(str(out / "asymptotics_ldf.png"))
        write_metadata(out / "metadata.json", "asymptotics ldf", cfg, args.seed, outputs)
        print("asymptotics ldf: wrote G, G_hat and crossover tables")
        return 0

    if dataset == "correlations":
        params = _params_from_config(cfg)
        c = float(cfg.get("c", 0.5))
        L = int(cfg.get("L", 512))
        lags_cfg = cfg.get("lags", [1, 2, 4, 8, 16, 32, 64])
        lags = tuple(int(k) for k in (lags_cfg if isinstance(lags_cfg, list)
                                      else [lags_cfg]))
        stats = asymptotics.transfer_matrix_stats(params, c, L, lags)
        rows = list(zip(stats.lags, stats.cov))
        _write_table(out, "asymptotics_correlations", ["lag", "covariance"],
                     rows, args.format, outputs)
        write_metadata(out / "metadata.json", "asymptotics correlations",
                       {**cfg, "z_star": stats.z_star, "xi": stats.xi,
                        "amplitude": stats.amplitude}, args.seed, outputs)
        print(f"asymptotics correlations: xi = {stats.xi:.4g}, A = {stats.amplitude:.4g}")
        return 0

    if dataset == "transition-cluster":
        theta = float(cfg.get("theta", 4.0))
        M, N = int(cfg.get("M", 400)), int(cfg.get("N", 200))
        law = transition.transition_cluster_dist(theta, M, N)
        rows = [(n, law.p_mid(n)) for n in range(1, M, max(1, M // 200))]
        _write_table(out, "transition_cluster", ["n", "P_mid"], rows, args.format,
                     outputs)
        chi_rows = [(x, law.chi_density(x)) for x in np.linspace(0, 0.999, 200)]
        _write_table(out, "transition_chi", ["chi", "density"], chi_rows, args.format,
                     outputs)
        write_metadata(out / "metadata.json", "asymptotics transition-cluster",
                       {**cfg, "p_zero": law.p_zero, "p_full": law.p_full,
                        "chi_atom": law.chi_atom, "chi_mass": law.chi_mass(),
                        "mean_cluster": law.mean_cluster,
                        "expected_clusters": law.expected_clusters},
                       args.seed, outputs)
        print(f"transition-cluster: theta={theta}, chi mass = {law.chi_mass():.12f}")
        return 0

    raise GtasepError(f"unknown asymptotics dataset {dataset!r}")


def cmd_sample(args, cfg: dict, out: Path) -> int:
    params = _params_from_config(cfg)
    L = int(cfg.get("L", 512))
    c = float(cfg.get("c", 0.5))
    n_samples = int(cfg.get("samples", 2000))
    lags_cfg = cfg.get("lags", [1, 2, 4, 8, 16, 32])
    lags = tuple(int(k) for k in (lags_cfg if isinstance(lags_cfg, list) else [lags_cfg]))
    tm = asymptotics.transfer_matrix_stats(params, c, L, lags)
    z = float(cfg.get("z", tm.z_star))
    stats = simulate.stationary_ensemble_stats(L, params, z, n_samples,
                                               seed=args.seed, lags=lags)
    outputs: list[str] = []
    cov_rows = [(k, stats["cov"][k][0], stats["cov"][k][1], tm.cov[j])
                for j, k in enumerate(lags)]
    _write_table(out, "sample_cov", ["lag", "covariance", "stderr", "exact"],
                 cov_rows, args.format, outputs)
    summary_rows = [
        ("density", stats["density"][0], stats["density"][1], c),
        ("width_sq", stats["width_sq"][0], stats["width_sq"][1], tm.amplitude / 12),
    ]
    _write_table(out, "sample_summary", ["quantity", "value", "stderr", "exact"],
                 summary_rows, args.format, outputs)
    if args.plot:
        from . import plotting

        plotting.plot_correlations(list(lags), [r[1] for r in cov_rows],
                                   [r[2] for r in cov_rows], [r[3] for r in cov_rows],
                                   out / "sample_cov.png")
        outputs.append(str(out / "sample_cov.png"))
    write_metadata(out / "metadata.json", "sample",
                   {**cfg, "z_star": tm.z_star, "xi": tm.xi,
                    "amplitude": tm.amplitude}, args.seed, outputs)
    print(f"sample: density {stats['density'][0]:.5f} (target {c}), "
          f"width {stats['width_sq'][0]:.5f} vs A/12 = {tm.amplitude / 12:.5f}")
    return 0


def cmd_validate(args, cfg: dict, out: Path) -> int:
    from .validation import run_validation_suite

    report = run_validation_suite(seed=args.seed)
    path = write_json(out / "validation_report.json", report)
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"[{status}] {check['name']} ({check['elapsed_s']}s)")
    print(f"validation: {report['n_checks'] - report['n_failed']}/"
          f"{report['n_checks']} checks passed -> {path}")
    write_metadata(out / "metadata.json", "validate", cfg, args.seed, [str(path)])
    return 0 if report["passed"] else VALIDATION_FAILURE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtasep",
        description="Generalized TASEP: exact solutions, asymptotics, Monte Carlo.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", type=Path, default=None,
                        help="key=value config file")
        sp.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config entry")
        sp.add_argument("--seed", type=int, default=20240801)
        sp.add_argument("--out", type=Path, default=Path("out"))
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        plot = sp.add_mutually_exclusive_group()
        plot.add_argument("--plot", dest="plot", action="store_true", default=True,
                          help="render figures next to the tables (default)")
        plot.add_argument("--no-plot", dest="plot", action="store_false")

    for name, help_text in [
        ("simulate", "run the Monte Carlo ensemble"),
        ("exact", "exact finite-size observables"),
        ("bethe", "current-cumulant series"),
        ("sample", "exact stationary sampler statistics"),
        ("validate", "run the cross-validation suite"),
    ]:
        common(sub.add_parser(name, help=help_text))
    asym = sub.add_parser("asymptotics", help="thermodynamic/crossover datasets")
    asym.add_argument("dataset", nargs="?", default="r-theta",
                      choices=("r-theta", "constants", "flow", "ldf",
                               "correlations", "transition-cluster"))
    common(asym)
    return parser


_COMMANDS = {
    "simulate": cmd_simulate,
    "exact": cmd_exact,
    "bethe": cmd_bethe,
    "asymptotics": cmd_asymptotics,
    "sample": cmd_sample,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = parse_config(args.config) if args.config else {}
        cfg = apply_overrides(cfg, args.overrides)
    except (OSError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return USAGE_ERROR
    out = Path(args.out)
    try:
        return _COMMANDS[args.command](args, cfg, out)
    except ResourceCapError as err:
        print(f"resource error: {err}", file=sys.stderr)
        return RESOURCE_ERROR
    except GtasepError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
