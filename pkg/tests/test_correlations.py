import numpy as np
import pytest

from wealthnet import correlations, dynamics, graphs
from wealthnet.dynamics import BMParams, WealthState
from wealthnet.errors import InsufficientDataError, ParameterError


def star(n_leaves: int) -> graphs.Network:
    edges = np.array([[0, i] for i in range(1, n_leaves + 1)], dtype=np.int64)
    return graphs._network_from_edges(n_leaves + 1, edges)


def degree_mixing_r(net: graphs.Network) -> float | None:
    """Brute-force mixing-matrix evaluation of the degree assortativity.

    Accumulates e_jk (fraction of edge ends joining degrees j and k, both
    orientations), q_k = sum_j e_jk and its variance, then applies
    r = sum_jk j k (e_jk - q_j q_k) / sigma_q^2 directly.
    """
    deg = net.degree
    kmax = deg.max()
    e = np.zeros((kmax + 1, kmax + 1))
    for u, v in net.edges:
        e[deg[u], deg[v]] += 1.0
        e[deg[v], deg[u]] += 1.0
    e /= e.sum()
    q = e.sum(axis=0)
    ks = np.arange(kmax + 1, dtype=float)
    mean_q = float(ks @ q)
    var_q = float((ks ** 2) @ q - mean_q ** 2)
    if var_q == 0.0:
        return None
    jk = np.outer(ks, ks)
    return float((jk * (e - np.outer(q, q))).sum() / var_q)


@pytest.mark.parametrize("n_leaves", [2, 5, 50])
def test_star_is_exactly_disassortative(n_leaves):
    assert correlations.r_degree(star(n_leaves)) == -1.0


def test_regular_graphs_have_undefined_r_degree():
    assert correlations.r_degree(graphs.complete(10)) is None
    assert correlations.r_degree(graphs.ring_lattice(12, 2)) is None


def test_r_degree_needs_edges():
    with pytest.raises(InsufficientDataError):
        correlations.r_degree(graphs.empty(5))


def test_erdos_renyi_is_uncorrelated():
    values = []
    for seed in range(20):
        r = correlations.r_degree(graphs.erdos_renyi(5000, 0.002, seed=seed))
        assert r is not None
        values.append(r)
    assert abs(np.mean(values)) < 0.02


def test_edge_end_pearson_equals_mixing_matrix_form():
    # two-formula equivalence on 50 random graphs
    checked = 0
    seed = 0
    rng = np.random.default_rng(123)
    while checked < 50:
        n = int(rng.integers(5, 31))
        p = float(rng.uniform(0.1, 0.6))
        net = graphs.erdos_renyi(n, p, seed=seed)
        seed += 1
        if len(net.edges) == 0:
            continue
        direct = degree_mixing_r(net)
        pearson = correlations.r_degree(net)
        if direct is None:
            assert pearson is None
            continue
        assert pearson == pytest.approx(direct, abs=1e-12)
        checked += 1


def test_r_wealth_basics():
    net = graphs.complete(6)
    equal = WealthState(np.ones(6))
    assert correlations.r_wealth(net, equal) is None

    two_edges = graphs._network_from_edges(4, np.array([[0, 1], [2, 3]]))
    state = WealthState(np.array([1.0, 1.0, 2.0, 2.0]))
    assert correlations.r_wealth(two_edges, state) == pytest.approx(1.0)


def test_r_degree_wealth_basics():
    net = graphs.complete(8)
    state = WealthState(np.linspace(1, 2, 8))
    assert correlations.r_degree_wealth(net, state) is None  # all degrees equal

    s = star(5)
    wealth_eq_degree = WealthState(s.degree.astype(float) + 0.5)
    assert correlations.r_degree_wealth(s, wealth_eq_degree) == pytest.approx(1.0)


def test_r_degree_wealth_shuffled_null():
    net = graphs.octopus(400, 40, 0.5, seed=2)
    rng = np.random.default_rng(5)
    wealth = rng.permutation(net.degree.astype(float) + 0.1)
    r = correlations.r_degree_wealth(net, WealthState(wealth))
    assert abs(r) < 3.0 / np.sqrt(net.n)


def test_relabeling_invariance():
    net = graphs.octopus(60, 10, 0.5, seed=4)
    rng = np.random.default_rng(9)
    wealth = rng.lognormal(0, 1, net.n)
    perm = rng.permutation(net.n)
    remapped_edges = perm[net.edges]
    net2 = graphs._network_from_edges(net.n, remapped_edges)
    wealth2 = np.empty_like(wealth)
    wealth2[perm] = wealth
    r1 = correlations.r_wealth(net, WealthState(wealth))
    r2 = correlations.r_wealth(net2, WealthState(wealth2))
    assert r2 == pytest.approx(r1, abs=1e-12)
    assert correlations.r_degree(net2) == pytest.approx(correlations.r_degree(net), abs=1e-12)


def test_correlation_report_bounds():
    net = graphs.octopus(100, 10, 0.5, seed=6)
    state = WealthState(np.random.default_rng(7).lognormal(0, 2, 100))
    rep = correlations.correlation_report(net, state, m_over_n=0.1)
    for value in (rep.r_degree, rep.r_wealth, rep.r_degree_wealth):
        assert value is None or -1.0 <= value <= 1.0
    assert rep.m_over_n == 0.1


def test_sweep_smoke():
    params = BMParams(m=1.0, sigma2=0.05, j=0.05, coupling="degree", dt=0.01)
    rows = correlations.correlation_sweep(
        "mixed", [0.5, 0.25], n=60, params=params,
        steps=300, burn_in=100, ensemble=2, seed=3, snapshot_every=100,
    )
    assert [r.m_over_n for r in rows] == [0.5, 0.25]
    for row in rows:
        assert row.n_runs == 2
        for value in (row.r_degree, row.r_wealth, row.r_degree_wealth):
            assert value is None or -1.0 <= value <= 1.0


def test_sweep_validates_family():
    params = BMParams(m=1.0, sigma2=0.05, j=0.05)
    with pytest.raises(ParameterError):
        correlations.correlation_sweep("ba", [0.5], 50, params, 10, 0, 1, 0)
