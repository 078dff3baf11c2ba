"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s``.  The simulation-backed
criteria (1, 3, 4) integrate large ensembles and together take tens of
minutes on a small machine; everything is seeded and deterministic.
"""
import math

import numpy as np
import pytest

from wealthnet import analytic, correlations, dynamics, graphs, inference
from wealthnet.dynamics import BMParams, NoiseSpec, WealthState
from wealthnet.seeding import mix64

FIG_PARAMS = BMParams(m=1.0, sigma2=0.05, j=0.05, coupling="uniform", dt=0.01)


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"\n[acceptance] {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{criterion}: {detail}"


# ---------------------------------------------------------------------------
# 1. Mean-field Pareto index on the complete graph


def test_criterion_1_meanfield_pareto_index():
    net = graphs.complete(1000)
    seeds = [mix64(4202, r) for r in range(10)]
    results = dynamics.simulate_ensemble(
        net, FIG_PARAMS, steps=300_000, burn_in=200_000,
        seeds=seeds, snapshot_every=10_000,
    )
    finals = np.concatenate([r.final.normalized() for r in results])
    snaps = np.concatenate([s.normalized() for r in results for s in r.snapshots])

    mf = analytic.MeanFieldParams(alpha=2.0)
    ks = inference.ks_statistic(finals, lambda w: 1.0 - analytic.meanfield_ccdf(w, mf))
    ks_crit = inference.ks_critical_value(len(finals), 0.01)
    # Hill index on the pooled sampling window, deep threshold (top 1%):
    # the exponential cut-off of the mean-field law biases shallower thresholds
    w_min = float(np.quantile(snaps, 0.99))
    fit = inference.fit_pareto_tail(snaps, w_min)
    ok = abs(fit.alpha_hat - 2.0) <= 0.15 and ks < ks_crit
    report(
        "criterion 1 (mean-field alpha = 1 + J/sigma^2)", ok,
        f"alpha_hat={fit.alpha_hat:.3f} (target 2.0 +- 0.15, n_tail={fit.n_tail}), "
        f"KS={ks:.4f} < crit={ks_crit:.4f} on n={len(finals)}",
    )


# ---------------------------------------------------------------------------
# 2. Isolated-agent log-normal limit


def test_criterion_2_isolated_gibrat_limit():
    net = graphs.empty(1000)
    res = dynamics.simulate(net, FIG_PARAMS, steps=10_000, seed=606, snapshot_every=2_500)
    by_t = {round(s.t): s for s in res.snapshots}
    checkpoints = [25, 50, 100]
    variances = [float(np.var(np.log(by_t[t].w))) for t in checkpoints]
    slope = float(np.polyfit(checkpoints, variances, 1)[0])
    target = 2.0 * FIG_PARAMS.sigma2

    logs = np.log(by_t[100].normalized())
    z = (logs - logs.mean()) / logs.std()
    from scipy.stats import norm

    ks = inference.ks_statistic(z, norm.cdf)
    ks_crit = inference.ks_critical_value(len(z), 0.01)
    ok = abs(slope - target) <= 0.1 * target and ks < ks_crit
    report(
        "criterion 2 (isolated-agent log-normal limit)", ok,
        f"var(log w) slope={slope:.4f} (target {target:.3f} +- 10%), "
        f"normality KS={ks:.4f} < crit={ks_crit:.4f} at t=100",
    )


# ---------------------------------------------------------------------------
# 3. Mixture law on the core-periphery network


def test_criterion_3_mixture_law():
    n, m_core = 4000, 500
    net = graphs.mixed_core(n, m_core)
    seeds = [mix64(303, r) for r in range(4)]
    results = dynamics.simulate_ensemble(
        net, FIG_PARAMS, steps=50_000, burn_in=30_000,
        seeds=seeds, snapshot_every=5_000,
    )
    pool = np.concatenate([s.normalized() for r in results for s in r.snapshots])
    fit = inference.fit_mixture(pool, core_fraction_known=m_core / n)
    ok = fit.ks < 0.03 and fit.mixed_regime
    report(
        "criterion 3 (mixture law, M/N = 1/8)", ok,
        f"total KS={fit.ks:.4f} (< 0.03), slope below/above crossover = "
        f"{fit.slope_below:.2f}/{fit.slope_above:.2f}, gap={fit.slope_gap:.2f} "
        f"(mixed regime flagged: {fit.mixed_regime})",
    )


# ---------------------------------------------------------------------------
# 4. Octopus correlation pattern


def test_criterion_4_octopus_correlations():
    fractions = [1.0, 0.5, 0.25, 0.125, 0.0625]
    params = BMParams(m=1.0, sigma2=0.05, j=0.05, coupling="degree", dt=0.01)
    rows = correlations.correlation_sweep(
        "octopus", fractions, n=1000, params=params,
        steps=40_000, burn_in=20_000, ensemble=10, seed=99, snapshot_every=5_000,
    )
    r_deg = [row.r_degree for row in rows]
    r_wea = [row.r_wealth for row in rows]
    r_dw = [row.r_degree_wealth for row in rows]

    degree_monotone = all(a > b for a, b in zip(r_deg, r_deg[1:]))
    wealth_positive = r_wea[-1] is not None and r_wea[-1] > 0
    # "increasing as M/N decreases": positive trend against decreasing M/N
    x = np.log2(fractions)
    trend = float(np.polyfit(x, r_wea, 1)[0])  # slope vs log2(M/N)
    wealth_trend = trend < 0 and r_wea[-1] > r_wea[0]
    dw_small_at_small_core = abs(r_dw[-1]) < abs(r_dw[1])
    ok = degree_monotone and wealth_positive and wealth_trend and dw_small_at_small_core
    report(
        "criterion 4 (octopus correlation pattern)", ok,
        f"r_degree={[f'{v:+.3f}' for v in r_deg]} strictly decreasing: {degree_monotone}; "
        f"r_wealth={[f'{v:+.4f}' for v in r_wea]} positive at 1/16 and rising as M/N "
        f"falls (trend {trend:+.5f}/octave): {wealth_positive and wealth_trend}; "
        f"|r_dw(1/16)|={abs(r_dw[-1]):.3f} < |r_dw(1/2)|={abs(r_dw[1]):.3f}: "
        f"{dw_small_at_small_core}",
    )


# ---------------------------------------------------------------------------
# 5. Star-graph assortativity oracle


def _degree_mixing_r(net: graphs.Network) -> float | None:
    # explicit accumulation of the degree mixing matrix e_jk, q_k, sigma_q^2
    deg = net.degree
    e = np.zeros((deg.max() + 1, deg.max() + 1))
    for u, v in net.edges:
        e[deg[u], deg[v]] += 1.0
        e[deg[v], deg[u]] += 1.0
    e /= e.sum()
    q = e.sum(axis=0)
    ks = np.arange(len(q), dtype=float)
    var_q = float((ks ** 2) @ q - (ks @ q) ** 2)
    if var_q == 0.0:
        return None
    return float((np.outer(ks, ks) * (e - np.outer(q, q))).sum() / var_q)


def test_criterion_5_star_and_mixing_matrix_oracle():
    stars_exact = []
    for n_leaves in (2, 5, 50):
        edges = np.array([[0, i] for i in range(1, n_leaves + 1)])
        star = graphs._network_from_edges(n_leaves + 1, edges)
        stars_exact.append(correlations.r_degree(star) == -1.0)

    checked, max_err, seed = 0, 0.0, 0
    rng = np.random.default_rng(55)
    while checked < 50:
        net = graphs.erdos_renyi(int(rng.integers(5, 31)), float(rng.uniform(0.1, 0.6)),
                                 seed=seed)
        seed += 1
        if len(net.edges) == 0:
            continue
        direct = _degree_mixing_r(net)
        pearson = correlations.r_degree(net)
        if direct is None:
            assert pearson is None
            continue
        max_err = max(max_err, abs(pearson - direct))
        checked += 1
    ok = all(stars_exact) and max_err <= 1e-12
    report(
        "criterion 5 (star oracle and mixing-matrix equivalence)", ok,
        f"r_degree(star)=-1 exactly for n=2,5,50: {all(stars_exact)}; "
        f"max |edge-end Pearson - explicit accumulation| = {max_err:.2e} over 50 graphs",
    )


# ---------------------------------------------------------------------------
# 6. Scale-free degree tail


def test_criterion_6_barabasi_albert_tail():
    net = graphs.barabasi_albert(20_000, 2, 2, seed=11)
    values, p_gt = inference.eccdf(net.degree.astype(float))
    # window: above the attachment scale, below the 10-survivors cut
    hi = values[p_gt >= 10 / net.n].max()
    slope = inference.loglog_slope(values, p_gt, 8.0, hi)
    ok = abs(slope - (-2.0)) <= 0.3
    report(
        "criterion 6 (scale-free degree CCDF slope)", ok,
        f"log-log CCDF slope={slope:.3f} over k in [8, {hi:.0f}] "
        f"(target -2.0 +- 0.3; density exponent -3)",
    )


# ---------------------------------------------------------------------------
# 7. Additive-process tail index


def test_criterion_7_additive_process_index():
    base = NoiseSpec(mu=-0.05, s=0.3)
    alpha_root = dynamics.pareto_index_condition(base)

    fits = []
    for seed, scale in ((5, 1.0), (6, 2.0)):
        noise = NoiseSpec(mu=-0.05, s=0.3, xi_mean=scale, xi_sd=0.5 * scale)
        path = dynamics.additive_reference(noise, 400_000, seed=seed)
        samples = path[2_000::25]
        samples = samples[samples > 0]
        _, fit = inference.select_crossover(samples)
        fits.append(fit)
    within = [abs(f.alpha_hat - alpha_root) <= 0.15 for f in fits]
    overlap = abs(fits[0].alpha_hat - fits[1].alpha_hat) <= 3 * math.hypot(
        fits[0].se_alpha, fits[1].se_alpha)
    ok = all(within) and overlap
    report(
        "criterion 7 (additive-process tail index)", ok,
        f"alpha_hat={fits[0].alpha_hat:.3f} (xi scale 1) and {fits[1].alpha_hat:.3f} "
        f"(xi scale 2) vs root {alpha_root:.4f} +- 0.15; 3-SE intervals overlap: {overlap}",
    )


# ---------------------------------------------------------------------------
# 8. Exact invariants


def test_criterion_8_exact_invariants():
    # (a) exchange conservation, both couplings, 20 random states
    rng = np.random.default_rng(88)
    conservation_ok = True
    for coupling in ("uniform", "degree"):
        params = BMParams(m=1.0, sigma2=0.05, j=0.05, coupling=coupling, dt=0.01)
        for net in (graphs.complete(200), graphs.erdos_renyi(300, 0.03, seed=1)):
            for _ in range(10):
                w = rng.lognormal(0, 2, net.n)
                w2 = w + params.dt * dynamics.exchange_rate(net, params, w)
                conservation_ok &= abs(w2.sum() - w.sum()) <= 1e-12 * w.sum()

    # (b) 2^10 rescaling: bitwise-identical normalized trajectories,
    # including across an exponent-recentering checkpoint
    net = graphs.complete(64)
    kwargs = dict(steps=4_500, snapshot_every=1_500, seed=17)
    base = dynamics.simulate(net, FIG_PARAMS, **kwargs)
    scaled = dynamics.simulate(net, FIG_PARAMS, init=np.full(64, 2.0 ** 10), **kwargs)
    rescale_ok = all(
        np.array_equal(a.normalized(), b.normalized())
        for a, b in zip(base.snapshots + [base.final], scaled.snapshots + [scaled.final])
    )

    # (c) densities normalize to 1 within 1e-8 by quadrature
    from scipy.integrate import quad

    def mass(pdf, lo):
        val, _ = quad(lambda u: pdf(math.exp(u)) * math.exp(u),
                      math.log(lo) if lo > 0 else -60, 60, limit=400,
                      points=[-5.0, 0.0, 5.0])
        return val

    mix = analytic.MixtureParams(0.25, analytic.MeanFieldParams(2.0),
                                 analytic.GibratParams(2.0, 1.0))
    norms = [
        mass(lambda w: analytic.pareto_pdf(w, analytic.ParetoParams(2.0, 1.0)), 1.0),
        mass(lambda w: analytic.gibrat_pdf(w, analytic.GibratParams(2.0, 1.0)), 0.0),
        mass(lambda w: analytic.meanfield_pdf(w, analytic.MeanFieldParams(2.0)), 0.0),
        mass(lambda w: analytic.mixture_pdf(w, mix), 0.0),
    ]
    norm_ok = all(abs(v - 1.0) < 1e-8 for v in norms)

    # (d) mean-field law has unit mean for every tested alpha
    means = [
        mass(lambda w, a=a: w * analytic.meanfield_pdf(w, analytic.MeanFieldParams(a)), 0.0)
        for a in (1.5, 2.0, 3.0, 5.0)
    ]
    mean_ok = all(abs(v - 1.0) < 1e-8 for v in means)

    ok = conservation_ok and rescale_ok and norm_ok and mean_ok
    report(
        "criterion 8 (exact invariants)", ok,
        f"conservation<=1e-12/step: {conservation_ok}; bitwise w-tilde under 2^10 "
        f"rescale: {rescale_ok}; pdf norms within 1e-8: {norm_ok} {['%.1e' % abs(v-1) for v in norms]}; "
        f"mean-field unit means within 1e-8: {mean_ok}",
    )


# ---------------------------------------------------------------------------
# 9. Integrator cross-check


def test_criterion_9_scheme_cross_check():
    net = graphs.complete(200)
    stats = {}
    for scheme, master in (("split", 4040), ("heun", 5050)):
        seeds = [mix64(master, r) for r in range(24)]
        results = dynamics.simulate_ensemble(net, FIG_PARAMS, steps=1_000,
                                             seeds=seeds, scheme=scheme)
        means = [float(np.mean(np.log(r.final.normalized()))) for r in results]
        variances = [float(np.var(np.log(r.final.normalized()))) for r in results]
        stats[scheme] = {
            "mean": (np.mean(means), np.std(means, ddof=1) / math.sqrt(len(means))),
            "var": (np.mean(variances), np.std(variances, ddof=1) / math.sqrt(len(variances))),
        }
    agree = {}
    for key in ("mean", "var"):
        a, sa = stats["split"][key]
        b, sb = stats["heun"][key]
        agree[key] = abs(a - b) <= 3 * math.hypot(sa, sb)
    ok = agree["mean"] and agree["var"]
    report(
        "criterion 9 (split vs Heun cross-check)", ok,
        f"mean(log w~): {stats['split']['mean'][0]:.4f} vs {stats['heun']['mean'][0]:.4f}; "
        f"var(log w~): {stats['split']['var'][0]:.4f} vs {stats['heun']['var'][0]:.4f}; "
        f"within 3 combined SE: {agree}",
    )
