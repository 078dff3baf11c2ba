"""Command-line experiment runner.

Subcommands: ``net`` (write a generated network as an edge list),
``simulate`` (integrate an ensemble and dump snapshots plus a pooled
normalized-wealth sample), ``fit`` (tail/body/mixture fits of a sample
file), ``sweep-correlations`` (assortativity table over M/N) and
``figure`` (presets reproducing the reference figures' data).

Every run echoes its fully resolved configuration into the output
directory; identical config and seed give byte-identical outputs.  Exit
codes: 0 success, 2 parameter/insufficient-data error, 3 numerical error,
4 I/O error; error messages are single lines prefixed ``ERROR[<kind>]``.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic, correlations, dynamics, graphs, inference, plotting
from .config import CONFIG_VERSION, ExperimentConfig, PRESET_NAMES, preset, topology_to_dict
from .dynamics import BMParams
from .errors import InsufficientDataError, NumericalError, ParameterError
from .seeding import mix64

EXIT_OK = 0
EXIT_PARAMETER = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_GRAPH_TAG = 0x6E65  # seed namespace tag for per-run/-cell graph realizations
_STATIONARITY_KS_BOUND = 0.05

_FLOAT_FMT = "%.17g"  # lossless float round-trip in text outputs


def _fmt(x: float) -> str:
    return _FLOAT_FMT % x


# ---------------------------------------------------------------------------
# Argument plumbing


def _add_topology_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topology", choices=sorted(("complete", "er", "ring", "ws", "ba",
                                                 "mixed", "octopus")))
    p.add_argument("--n", type=int)
    p.add_argument("--p-link", type=float, help="link probability (er)")
    p.add_argument("--q", type=int, help="ring half-neighborhood (ring, ws)")
    p.add_argument("--p-rewire", type=float, help="rewiring probability (ws)")
    p.add_argument("--m0", type=int, help="initial vertices (ba)")
    p.add_argument("--m-attach", type=int, help="edges per arrival (ba)")
    p.add_argument("--m-core", type=int, help="core size (mixed, octopus)")
    p.add_argument("--p-core", type=float, help="core link probability (octopus)")


def _add_dynamics_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--j", type=float, help="exchange strength J")
    p.add_argument("--sigma2", type=float, help="half-variance of the multiplicative noise")
    p.add_argument("--m-drift", type=float, help="drift of the multiplicative noise")
    p.add_argument("--dt", type=float, help="integration step")
    p.add_argument("--coupling", choices=("uniform", "degree"))


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", type=int)
    p.add_argument("--burn-in", type=int)
    p.add_argument("--snapshot-every", type=int)
    p.add_argument("--ensemble", type=int)
    p.add_argument("--seed", type=int)


def _require(value, flag: str):
    if value is None:
        raise ParameterError(f"missing required flag {flag}")
    return value


def _topology_from_args(args, seed: int) -> graphs.TopologySpec:
    family = _require(args.topology, "--topology")
    n = _require(args.n, "--n")
    graph_seed = mix64(seed, _GRAPH_TAG)
    if family == "complete":
        return graphs.Complete(n, seed=graph_seed)
    if family == "er":
        return graphs.ErdosRenyi(n, _require(args.p_link, "--p-link"), seed=graph_seed)
    if family == "ring":
        return graphs.RingLattice(n, _require(args.q, "--q"), seed=graph_seed)
    if family == "ws":
        return graphs.WattsStrogatz(
            n, _require(args.q, "--q"), _require(args.p_rewire, "--p-rewire"), seed=graph_seed
        )
    if family == "ba":
        return graphs.BarabasiAlbert(
            n, _require(args.m0, "--m0"), _require(args.m_attach, "--m-attach"), seed=graph_seed
        )
    if family == "mixed":
        return graphs.MixedCore(n, _require(args.m_core, "--m-core"), seed=graph_seed)
    if family == "octopus":
        p_core = 0.5 if args.p_core is None else args.p_core
        return graphs.Octopus(n, _require(args.m_core, "--m-core"), p_core, seed=graph_seed)
    raise ParameterError(f"unknown topology family {family!r}")


def _parse_fractions(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ParameterError(f"cannot parse M/N list {text!r}") from exc


def _resolve_config(args, need_topology: bool = True) -> ExperimentConfig:
    """File config (if any) with CLI flags layered on top."""
    if getattr(args, "config", None):
        cfg = ExperimentConfig.from_json_file(args.config)
    else:
        seed = args.seed if args.seed is not None else 0
        topology = _topology_from_args(args, seed) if need_topology else None
        cfg = ExperimentConfig(
            topology=topology if topology is not None else graphs.Complete(2),
            dynamics=BMParams(m=1.0, sigma2=0.05, j=0.05, coupling="uniform", dt=0.01),
            steps=0,
        )
    if getattr(args, "config", None) and args.topology is not None:
        cfg = dataclasses.replace(cfg, topology=_topology_from_args(
            args, args.seed if args.seed is not None else cfg.seed))
    elif getattr(args, "config", None):
        top = cfg.topology
        for flag, fieldname in (("n", "n"), ("m_core", "m_core"), ("p_core", "p_core"),
                                ("p_link", "p_link"), ("q", "q"), ("p_rewire", "p_rewire"),
                                ("m0", "m0"), ("m_attach", "m")):
            val = getattr(args, flag, None)
            if val is not None:
                if not hasattr(top, fieldname):
                    raise ParameterError(
                        f"--{flag.replace('_', '-')} does not apply to this topology family")
                top = dataclasses.replace(top, **{fieldname: val})
        cfg = dataclasses.replace(cfg, topology=top)

    dyn = cfg.dynamics
    for flag, fieldname in (("j", "j"), ("sigma2", "sigma2"), ("m_drift", "m"),
                            ("dt", "dt"), ("coupling", "coupling")):
        val = getattr(args, flag, None)
        if val is not None:
            dyn = dataclasses.replace(dyn, **{fieldname: val})
    cfg = dataclasses.replace(cfg, dynamics=dyn)

    for flag, fieldname in (("steps", "steps"), ("burn_in", "burn_in"),
                            ("snapshot_every", "snapshot_every"),
                            ("ensemble", "ensemble"), ("seed", "seed")):
        val = getattr(args, flag, None)
        if val is not None:
            cfg = dataclasses.replace(cfg, **{fieldname: val})
    if getattr(args, "m_over_n", None) is not None:
        cfg = dataclasses.replace(cfg, m_over_n=_parse_fractions(args.m_over_n))
    cfg.validate()
    return cfg


def _prepare_out(path: str | Path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# net


def cmd_net(args) -> int:
    seed = args.seed if args.seed is not None else 0
    spec = _topology_from_args(args, seed)
    spec.validate()
    net = graphs.build(spec)
    graphs.write_edge_list(net, args.out)
    deg = net.degree
    print(
        f"n={net.n} edges={len(net.edges)} "
        f"degree min={deg.min()} mean={deg.mean():.3f} max={deg.max()}"
    )
    print(f"wrote {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def _write_snapshot_csv(path: Path, states: list[dynamics.WealthState]) -> None:
    with open(path, "w") as fh:
        fh.write("t,vertex,w,w_norm\n")
        for state in states:
            wn = state.normalized()
            t_str = _fmt(state.t)
            for vertex in range(len(state.w)):
                fh.write(f"{t_str},{vertex},{_fmt(state.w[vertex])},{_fmt(wn[vertex])}\n")


def _pool_normalized(results: list[dynamics.SimulationResult]) -> np.ndarray:
    parts = []
    for res in results:
        states = res.snapshots if res.snapshots else [res.final]
        parts.extend(state.normalized() for state in states)
    return np.concatenate(parts)


def _stationarity_ks(results: list[dynamics.SimulationResult]) -> float | None:
    """KS distance between the first- and second-half snapshot pools."""
    early, late = [], []
    for res in results:
        snaps = res.snapshots
        if len(snaps) < 2:
            return None
        half = len(snaps) // 2
        early.extend(s.normalized() for s in snaps[:half])
        late.extend(s.normalized() for s in snaps[half:])
    return inference.ks_two_sample(np.concatenate(early), np.concatenate(late))


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    out = _prepare_out(args.out)
    cfg.write(out / "config.resolved.json")
    net = graphs.build(cfg.topology)
    run_seeds = [mix64(cfg.seed, r) for r in range(cfg.ensemble)]
    results = dynamics.simulate_ensemble(
        net, cfg.dynamics, cfg.steps, seeds=run_seeds,
        burn_in=cfg.burn_in, snapshot_every=cfg.snapshot_every,
    )
    snap_dir = out / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    for r, res in enumerate(results):
        states = res.snapshots if res.snapshots else [res.final]
        _write_snapshot_csv(snap_dir / f"run_{r:03d}.csv", states)
    pool = _pool_normalized(results)
    with open(snap_dir / "pool.txt", "w") as fh:
        for value in pool:
            fh.write(_fmt(value) + "\n")
    ks = _stationarity_ks(results)
    summary = {
        "n": net.n,
        "edges": int(len(net.edges)),
        "runs": cfg.ensemble,
        "pool_size": int(len(pool)),
        "final_t": results[0].final.t,
        "log2_scale": [res.final.log2_scale for res in results],
        "stationarity_ks": ks,
        "stationarity_ok": None if ks is None else bool(ks < _STATIONARITY_KS_BOUND),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if ks is None:
        print(f"simulated {cfg.ensemble} runs; stationarity KS: n/a (need >= 2 snapshots)")
    else:
        verdict = "ok" if ks < _STATIONARITY_KS_BOUND else "NOT stationary"
        print(f"simulated {cfg.ensemble} runs; stationarity KS={ks:.4f} ({verdict})")
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit


def _read_samples(path: str, column: str) -> np.ndarray:
    import io

    text = Path(path).read_text()
    if not text.strip():
        raise InsufficientDataError(f"{path}: no samples found")
    first = text.splitlines()[0]
    try:
        if "," in first:
            header = [h.strip() for h in first.split(",")]
            if column not in header:
                raise ParameterError(f"{path}: no column {column!r} in CSV header {header}")
            data = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1,
                              usecols=header.index(column), ndmin=1)
        else:
            data = np.loadtxt(io.StringIO(text), ndmin=1)
    except ValueError as exc:
        raise ParameterError(f"{path}: cannot parse sample file: {exc}") from exc
    if data.size == 0:
        raise InsufficientDataError(f"{path}: no samples found")
    return np.asarray(data, dtype=float)


def _fit_report(samples: np.ndarray, mode: str, w_min: float | None,
                core_fraction: float | None) -> dict:
    report: dict = {
        "mode": mode, "n_samples": int(len(samples)),
        "alpha_hat": None, "w_star_hat": None, "beta_hat": None, "w0_hat": None,
        "ks": None, "n_tail": None, "slope_below": None, "slope_above": None,
    }
    if mode == "pareto":
        if w_min is not None:
            fit = inference.fit_pareto_tail(samples, w_min)
        else:
            _, fit = inference.select_crossover(samples)
        report.update(fit.to_dict())
    elif mode == "gibrat":
        fit = inference.fit_gibrat(samples)
        report.update(fit.to_dict())
    elif mode in ("mixture", "auto"):
        fit = inference.fit_mixture(samples, core_fraction_known=core_fraction)
        report.update(fit.to_dict())
    else:
        raise ParameterError(f"unknown fit mode {mode!r}")
    return report


def _fit_overlays(report: dict, values: np.ndarray) -> list:
    grid = np.geomspace(values.min(), values.max(), 256)
    overlays = []
    if report.get("alpha_hat") and report.get("w_star_hat"):
        pp = analytic.ParetoParams(report["alpha_hat"], report["w_star_hat"])
        tail_grid = grid[grid >= pp.w_star]
        if len(tail_grid) >= 2:
            scale = report.get("core_fraction", 1.0) or 1.0
            overlays.append(("tail fit", tail_grid,
                             scale * analytic.pareto_ccdf(tail_grid, pp)))
    if report.get("beta_hat") and report.get("w0_hat"):
        gp = analytic.GibratParams(report["beta_hat"], report["w0_hat"])
        weight = 1.0 - (report.get("core_fraction") or 0.0)
        overlays.append(("body fit", grid, weight * analytic.gibrat_ccdf(grid, gp)))
    return overlays


def cmd_fit(args) -> int:
    samples = _read_samples(args.samples, args.column)
    if np.any(samples <= 0):
        raise ParameterError(f"{args.samples}: samples must be positive")
    out = _prepare_out(args.out)
    report = _fit_report(samples, args.mode, args.w_min, args.core_fraction)
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    values, p_gt = inference.eccdf(samples)
    with open(out / "eccdf.csv", "w") as fh:
        fh.write("w,p_gt\n")
        for v, p in zip(values, p_gt):
            fh.write(f"{_fmt(v)},{_fmt(p)}\n")
    plotting.save_ccdf_figure(
        out / "eccdf.png", [("samples", values, p_gt)],
        title=f"{args.mode} fit", overlays=_fit_overlays(report, values),
    )
    brief = {k: report[k] for k in ("alpha_hat", "beta_hat", "ks") if report.get(k) is not None}
    print(f"fit mode={args.mode} n={len(samples)} " +
          " ".join(f"{k}={v:.4g}" for k, v in brief.items()))
    if report.get("slope_below") is not None:
        gap = report["slope_gap"]
        flag = "mixed regime" if report["mixed_regime"] else "single regime"
        print(f"slope below/above crossover: {report['slope_below']:.3f} / "
              f"{report['slope_above']:.3f} (gap {gap:.3f}: {flag})")
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep-correlations


def _family_name(spec: graphs.TopologySpec) -> str:
    if isinstance(spec, graphs.Octopus):
        return "octopus"
    if isinstance(spec, graphs.MixedCore):
        return "mixed"
    raise ParameterError("correlation sweeps support the octopus and mixed families")


def _write_sweep_csv(out: Path, rows: list[correlations.SweepRow]) -> None:
    def cell(v):
        return "NA" if v is None else _fmt(v)

    with open(out / "correlations.csv", "w") as fh:
        fh.write("m_over_n,r_degree,r_wealth,r_degree_wealth,n_runs\n")
        for r in rows:
            fh.write(f"{_fmt(r.m_over_n)},{cell(r.r_degree)},{cell(r.r_wealth)},"
                     f"{cell(r.r_degree_wealth)},{r.n_runs}\n")
    with open(out / "correlations_stderr.csv", "w") as fh:
        fh.write("m_over_n,se_degree,se_wealth,se_degree_wealth,n_runs\n")
        for r in rows:
            fh.write(f"{_fmt(r.m_over_n)},{cell(r.se_degree)},{cell(r.se_wealth)},"
                     f"{cell(r.se_degree_wealth)},{r.n_runs}\n")


def cmd_sweep_correlations(args) -> int:
    cfg = _resolve_config(args)
    if cfg.m_over_n is None:
        raise ParameterError("missing M/N sweep list (--m-over-n or config m_over_n)")
    family = _family_name(cfg.topology)
    out = _prepare_out(args.out)
    cfg.write(out / "config.resolved.json")
    p_core = getattr(cfg.topology, "p_core", 0.5)
    rows = correlations.correlation_sweep(
        family, cfg.m_over_n, cfg.topology.n, cfg.dynamics,
        steps=cfg.steps, burn_in=cfg.burn_in, ensemble=cfg.ensemble,
        seed=cfg.seed, p_core=p_core,
    )
    _write_sweep_csv(out, rows)
    plotting.save_correlation_figure(out / "correlations.png", rows,
                                     title=f"{family} N={cfg.topology.n}")
    for r in rows:
        cell = lambda v: "NA" if v is None else f"{v:+.4f}"
        print(f"M/N={r.m_over_n:g}: r_degree={cell(r.r_degree)} "
              f"r_wealth={cell(r.r_wealth)} r_degree_wealth={cell(r.r_degree_wealth)}")
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# figure


def _cell_topology(cfg: ExperimentConfig, cell: int, fraction: float) -> graphs.TopologySpec:
    n = cfg.topology.n
    m_core = int(round(fraction * n))
    if isinstance(cfg.topology, graphs.MixedCore):
        return graphs.MixedCore(n, m_core)
    if isinstance(cfg.topology, graphs.Octopus):
        return graphs.Octopus(n, m_core, cfg.topology.p_core,
                              seed=mix64(cfg.seed, cell, _GRAPH_TAG))
    raise ParameterError("figure sweeps support the octopus and mixed families")


def cmd_figure(args) -> int:
    base = preset(args.name)
    merged = argparse.Namespace(**vars(args))
    merged.config = None
    cfg = base
    for flag, fieldname in (("steps", "steps"), ("burn_in", "burn_in"),
                            ("snapshot_every", "snapshot_every"),
                            ("ensemble", "ensemble"), ("seed", "seed")):
        val = getattr(args, flag, None)
        if val is not None:
            cfg = dataclasses.replace(cfg, **{fieldname: val})
    if args.n is not None:
        # per-cell graphs carry their own core sizes; keep the placeholder valid
        cfg = dataclasses.replace(
            cfg, topology=dataclasses.replace(cfg.topology, n=args.n, m_core=args.n))
    if args.m_over_n is not None:
        cfg = dataclasses.replace(cfg, m_over_n=_parse_fractions(args.m_over_n))
    cfg.validate()

    out = _prepare_out(args.out)
    cfg.write(out / "config.resolved.json")

    if args.name == "fig5":
        rows = correlations.correlation_sweep(
            "octopus", cfg.m_over_n, cfg.topology.n, cfg.dynamics,
            steps=cfg.steps, burn_in=cfg.burn_in, ensemble=cfg.ensemble,
            seed=cfg.seed, p_core=cfg.topology.p_core,
        )
        _write_sweep_csv(out, rows)
        plotting.save_correlation_figure(
            out / "correlations.png", rows, title=f"octopus N={cfg.topology.n}")
        print(f"wrote {out}")
        return EXIT_OK

    fits_dir = out / "fits"
    fits_dir.mkdir(exist_ok=True)
    curves = []
    for cell, fraction in enumerate(cfg.m_over_n):
        spec = _cell_topology(cfg, cell, fraction)
        net = graphs.build(spec)
        run_seeds = [mix64(cfg.seed, cell, r) for r in range(cfg.ensemble)]
        results = dynamics.simulate_ensemble(
            net, cfg.dynamics, cfg.steps, seeds=run_seeds,
            burn_in=cfg.burn_in, snapshot_every=cfg.snapshot_every,
        )
        pool = _pool_normalized(results)
        cell_dir = fits_dir / f"mn_{fraction:g}"
        cell_dir.mkdir(exist_ok=True)
        with open(cell_dir / "pool.txt", "w") as fh:
            for value in pool:
                fh.write(_fmt(value) + "\n")
        report = _fit_report(pool, "mixture", None, fraction)
        (cell_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
        values, p_gt = inference.eccdf(pool)
        with open(cell_dir / "eccdf.csv", "w") as fh:
            fh.write("w,p_gt\n")
            for v, p in zip(values, p_gt):
                fh.write(f"{_fmt(v)},{_fmt(p)}\n")
        curves.append((f"M/N={fraction:g}", values, p_gt))
        print(f"M/N={fraction:g}: ks={report['ks']:.4f} slope_gap="
              f"{report['slope_gap']:.3f} mixed={report['mixed_regime']}")
    plotting.save_ccdf_figure(out / "ccdf.png", curves,
                              title=f"{args.name}: {_family_name(cfg.topology)} "
                                    f"N={cfg.topology.n}")
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wealthnet",
        description="Wealth-exchange dynamics on networks: generate, simulate, fit, correlate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_net = sub.add_parser("net", help="generate a network and write its edge list")
    _add_topology_args(p_net)
    p_net.add_argument("--seed", type=int)
    p_net.add_argument("--out", required=True)
    p_net.set_defaults(func=cmd_net)

    p_sim = sub.add_parser("simulate", help="integrate an ensemble and dump snapshots")
    p_sim.add_argument("--config", help="JSON config file (flags override)")
    _add_topology_args(p_sim)
    _add_dynamics_args(p_sim)
    _add_run_args(p_sim)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_fit = sub.add_parser("fit", help="fit a sample file (tail, body or mixture)")
    p_fit.add_argument("--samples", required=True,
                       help="one positive real per line, or a snapshot CSV")
    p_fit.add_argument("--column", default="w_norm", help="CSV column to read")
    p_fit.add_argument("--mode", choices=("pareto", "gibrat", "mixture", "auto"),
                       default="auto")
    p_fit.add_argument("--w-min", type=float, help="fixed tail threshold (pareto mode)")
    p_fit.add_argument("--core-fraction", type=float,
                       help="known mixture weight (mixture mode)")
    p_fit.add_argument("--out", required=True)
    p_fit.set_defaults(func=cmd_fit)

    p_sweep = sub.add_parser("sweep-correlations",
                             help="assortativity coefficients across M/N")
    p_sweep.add_argument("--config", help="JSON config file (flags override)")
    _add_topology_args(p_sweep)
    _add_dynamics_args(p_sweep)
    _add_run_args(p_sweep)
    p_sweep.add_argument("--m-over-n", help="comma-separated M/N list")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep_correlations)

    p_fig = sub.add_parser("figure", help="run a figure preset")
    p_fig.add_argument("name", choices=PRESET_NAMES)
    p_fig.add_argument("--n", type=int)
    p_fig.add_argument("--m-over-n", help="comma-separated M/N list")
    _add_run_args(p_fig)
    p_fig.add_argument("--out", required=True)
    p_fig.set_defaults(func=cmd_figure)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InsufficientDataError as exc:
        print(f"ERROR[insufficient-data] {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except ParameterError as exc:
        print(f"ERROR[parameter] {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except NumericalError as exc:
        print(f"ERROR[numerical] {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"ERROR[io] {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
