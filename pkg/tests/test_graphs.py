import numpy as np
import pytest
from scipy.stats import poisson

from wealthnet import graphs
from wealthnet.errors import ParameterError
from wealthnet.inference import ks_critical_value


def check_simple_graph(net):
    """Structural invariants every generator must satisfy."""
    edges = net.edges
    assert edges.shape[1] == 2
    assert np.all(edges[:, 0] < edges[:, 1])  # u < v: no self-loops, canonical
    if len(edges):
        assert edges.min() >= 0 and edges.max() < net.n
        as_pairs = {tuple(e) for e in edges.tolist()}
        assert len(as_pairs) == len(edges)  # no duplicates
    recomputed = np.bincount(edges.ravel(), minlength=net.n) if len(edges) else np.zeros(net.n)
    assert np.array_equal(net.degree, recomputed)
    assert net.degree.sum() == 2 * len(edges)


ALL_SPECS = [
    graphs.Complete(7),
    graphs.ErdosRenyi(60, 0.1, seed=3),
    graphs.RingLattice(20, 3),
    graphs.WattsStrogatz(40, 2, 0.3, seed=5),
    graphs.BarabasiAlbert(80, 3, 2, seed=8),
    graphs.MixedCore(50, 8),
    graphs.Octopus(50, 8, 0.4, seed=13),
]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: type(s).__name__)
def test_invariants_and_determinism(spec):
    net = graphs.build(spec)
    check_simple_graph(net)
    again = graphs.build(spec)
    assert np.array_equal(net.edges, again.edges)
    assert np.array_equal(net.degree, again.degree)


def test_complete_graph():
    net = graphs.complete(4)
    assert len(net.edges) == 6
    assert np.all(net.degree == 3)


def test_erdos_renyi_extremes():
    assert len(graphs.erdos_renyi(100, 0.0, seed=1).edges) == 0
    full = graphs.erdos_renyi(100, 1.0, seed=1)
    assert len(full.edges) == 100 * 99 // 2
    assert np.array_equal(full.edges, graphs.complete(100).edges)


def test_erdos_renyi_mean_edge_count():
    # Monte Carlo over seeds against the binomial mean p * C(n,2)
    n, p, reps = 200, 0.05, 1000
    pairs = n * (n - 1) // 2
    counts = np.array([len(graphs.erdos_renyi(n, p, seed=s).edges) for s in range(reps)])
    expected = p * pairs
    se = np.sqrt(pairs * p * (1 - p) / reps)
    assert abs(counts.mean() - expected) < 3 * se


def test_erdos_renyi_poisson_degrees():
    n, p = 2000, 0.005
    net = graphs.erdos_renyi(n, p, seed=42)
    lam = p * (n - 1)
    grid = np.arange(net.degree.max() + 1)
    ecdf = np.searchsorted(np.sort(net.degree), grid, side="right") / n
    d = np.max(np.abs(ecdf - poisson.cdf(grid, lam)))
    assert d < ks_critical_value(n, 0.01)


def test_ring_lattice():
    hexagon = graphs.ring_lattice(6, 1)
    assert len(hexagon.edges) == 6
    assert np.all(hexagon.degree == 2)
    net = graphs.ring_lattice(10, 2)
    assert len(net.edges) == 20
    assert np.all(net.degree == 4)
    # 2q = 4 < 5 is legal and gives the complete graph on 5 vertices
    k5 = graphs.ring_lattice(5, 2)
    assert np.array_equal(k5.edges, graphs.complete(5).edges)
    with pytest.raises(ParameterError):
        graphs.ring_lattice(6, 3)


def test_watts_strogatz_edge_count_preserved():
    ring = graphs.ring_lattice(40, 2)
    assert np.array_equal(graphs.watts_strogatz(40, 2, 0.0, seed=9).edges, ring.edges)
    for p_rewire in (0.1, 0.5, 1.0):
        net = graphs.watts_strogatz(200, 3, p_rewire, seed=11)
        assert len(net.edges) == 200 * 3
        check_simple_graph(net)


def test_watts_strogatz_full_rewire_near_poisson():
    n, q = 1000, 3
    net = graphs.watts_strogatz(n, q, 1.0, seed=2)
    assert len(net.edges) == n * q
    grid = np.arange(net.degree.max() + 1)
    ecdf = np.searchsorted(np.sort(net.degree), grid, side="right") / n
    d = np.max(np.abs(ecdf - poisson.cdf(grid, 2 * q)))
    assert d < ks_critical_value(n, 0.01)


def test_barabasi_albert_edge_count():
    net = graphs.barabasi_albert(100, 3, 2, seed=1)
    assert len(net.edges) == (100 - 3) * 2
    check_simple_graph(net)
    with pytest.raises(ParameterError):
        graphs.barabasi_albert(100, 2, 3, seed=1)


def test_mixed_core():
    net = graphs.mixed_core(100, 10)
    assert len(net.edges) == 45
    assert int((net.degree == 9).sum()) == 10
    assert int((net.degree == 0).sum()) == 90
    assert len(graphs.mixed_core(50, 0).edges) == 0
    assert np.array_equal(graphs.mixed_core(50, 50).edges, graphs.complete(50).edges)


def test_octopus():
    net = graphs.octopus(100, 10, 0.5, seed=21)
    core = graphs.erdos_renyi(10, 0.5, seed=21)
    assert len(net.edges) == len(core.edges) + 90
    assert int((net.degree == 1).sum()) >= 90
    # tentacle edges pair a core vertex with the tentacle vertex
    tentacles = net.edges[net.edges[:, 1] >= 10]
    assert len(tentacles) == 90
    assert np.all(tentacles[:, 0] < 10)
    # m_core = n degenerates to the pure random graph
    pure = graphs.octopus(64, 64, 0.3, seed=5)
    assert np.array_equal(pure.edges, graphs.erdos_renyi(64, 0.3, seed=5).edges)


def test_degree_distribution():
    hist = graphs.degree_distribution(graphs.complete(5))
    assert hist.counts[4] == 5 and hist.counts.sum() == 5
    assert hist.frequencies.sum() == pytest.approx(1.0)
    hist = graphs.degree_distribution(graphs.mixed_core(100, 10))
    assert hist.frequencies[9] == pytest.approx(0.1)
    assert hist.frequencies[0] == pytest.approx(0.9)
    hist = graphs.degree_distribution(graphs.ring_lattice(30, 4))
    assert hist.counts[8] == 30


def test_edge_list_round_trip(tmp_path):
    net = graphs.octopus(40, 6, 0.5, seed=3)
    path = tmp_path / "net.txt"
    graphs.write_edge_list(net, path)
    back = graphs.read_edge_list(path)
    assert back.n == net.n
    assert np.array_equal(back.edges, net.edges)
    assert np.array_equal(back.degree, net.degree)


def test_edge_list_reader_validates(tmp_path):
    bad_header = tmp_path / "a.txt"
    bad_header.write_text("3\n0 1\n")
    with pytest.raises(ParameterError):
        graphs.read_edge_list(bad_header)
    unordered = tmp_path / "b.txt"
    unordered.write_text("# n=3\n1 0\n")
    with pytest.raises(ParameterError):
        graphs.read_edge_list(unordered)
    duplicate = tmp_path / "c.txt"
    duplicate.write_text("# n=3\n0 1\n0 1\n")
    with pytest.raises(ParameterError):
        graphs.read_edge_list(duplicate)
    out_of_range = tmp_path / "d.txt"
    out_of_range.write_text("# n=3\n0 7\n")
    with pytest.raises(ParameterError):
        graphs.read_edge_list(out_of_range)


def test_spec_validation():
    with pytest.raises(ParameterError):
        graphs.build(graphs.ErdosRenyi(10, 1.5))
    with pytest.raises(ParameterError):
        graphs.build(graphs.MixedCore(10, 11))
    with pytest.raises(ParameterError):
        graphs.build(graphs.Octopus(10, 0))
    with pytest.raises(ParameterError):
        graphs.build(graphs.WattsStrogatz(10, 5, 0.5))
