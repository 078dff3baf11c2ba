"""Assortativity and degree-wealth correlation of a (network, state) pair.

``r_degree`` and ``r_wealth`` are Pearson correlations over edge-end value
pairs with both orientations of every edge included, the unbinned discrete
estimator of the usual mixing-matrix definitions.  ``r_degree_wealth`` is
the vertex-level Pearson correlation of degree against normalized wealth.
Zero-variance cases return ``None`` (an explicit undefined marker, rendered
as ``NA`` in sweep output) rather than 0 or an exception, so sweeps can plot
gaps honestly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dynamics, graphs
from .errors import InsufficientDataError, ParameterError
from .seeding import mix64

_GRAPH_TAG = 0x6E65  # distinguishes graph seeds from dynamics seeds per run


def _pearson(a: np.ndarray, b: np.ndarray) -> float | None:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = a - a.mean()
    db = b - b.mean()
    va = float(np.dot(da, da))
    vb = float(np.dot(db, db))
    if va == 0.0 or vb == 0.0:
        return None
    r = float(np.dot(da, db) / math.sqrt(va * vb))
    assert -1.0 - 1e-9 <= r <= 1.0 + 1e-9
    return min(1.0, max(-1.0, r))


def edge_end_values(net: graphs.Network, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both ordered orientations of every edge, as value pairs (2E of them)."""
    if len(net.edges) < 1:
        raise InsufficientDataError("network has no edges")
    u, v = net.edges[:, 0], net.edges[:, 1]
    return np.concatenate([x[u], x[v]]), np.concatenate([x[v], x[u]])


def r_degree(net: graphs.Network) -> float | None:
    """Assortativity by degree: edge-end Pearson over both orientations."""
    a, b = edge_end_values(net, net.degree.astype(float))
    return _pearson(a, b)


def r_wealth(net: graphs.Network, state: dynamics.WealthState) -> float | None:
    """Assortativity by wealth, computed on normalized wealth."""
    state.validate(net.n)
    a, b = edge_end_values(net, state.normalized())
    return _pearson(a, b)


def r_degree_wealth(net: graphs.Network, state: dynamics.WealthState) -> float | None:
    """Vertex-level Pearson correlation between degree and normalized wealth."""
    if net.n < 2:
        raise ParameterError("degree-wealth correlation needs at least two vertices")
    state.validate(net.n)
    return _pearson(net.degree.astype(float), state.normalized())


@dataclass(frozen=True)
class CorrelationReport:
    """The three coefficients for one stationary state (None = undefined)."""

    r_degree: float | None
    r_wealth: float | None
    r_degree_wealth: float | None
    m_over_n: float | None = None


def correlation_report(
    net: graphs.Network, state: dynamics.WealthState, m_over_n: float | None = None
) -> CorrelationReport:
    return CorrelationReport(
        r_degree=r_degree(net),
        r_wealth=r_wealth(net, state),
        r_degree_wealth=r_degree_wealth(net, state),
        m_over_n=m_over_n,
    )


@dataclass(frozen=True)
class SweepRow:
    """Ensemble mean (and standard error) of each coefficient at one M/N."""

    m_over_n: float
    r_degree: float | None
    r_wealth: float | None
    r_degree_wealth: float | None
    se_degree: float | None
    se_wealth: float | None
    se_degree_wealth: float | None
    n_runs: int


def _mean_se(values: list[float | None]) -> tuple[float | None, float | None]:
    defined = [v for v in values if v is not None]
    if not defined:
        return None, None
    mean = float(np.mean(defined))
    se = float(np.std(defined, ddof=1) / math.sqrt(len(defined))) if len(defined) > 1 else None
    return mean, se


def correlation_sweep(
    family: str,
    m_over_n_values: Sequence[float],
    n: int,
    params: dynamics.BMParams,
    steps: int,
    burn_in: int,
    ensemble: int,
    seed: int,
    p_core: float = 0.5,
    snapshot_every: int | None = None,
) -> list[SweepRow]:
    """Sweep M/N for the chosen core-periphery family.

    Each M/N cell gets one network realization (cell c's graph seed is
    mix64(seed, c, tag)) on which ``ensemble`` independent stationary states
    are integrated (run r uses dynamics seed mix64(seed, c, r)); each
    coefficient is averaged over the runs in which it is defined.  With
    ``snapshot_every`` set, a run's value is the mean over its post-burn-in
    snapshots (wealth coefficients are noisy in heavy-tailed states and the
    coefficient process is stationary, so time-averaging sharpens them).
    """
    if family not in ("octopus", "mixed"):
        raise ParameterError("correlation sweep supports the octopus and mixed families")
    if ensemble < 1:
        raise ParameterError("ensemble must be >= 1")
    rows = []
    for c, fraction in enumerate(m_over_n_values):
        m_core = int(round(fraction * n))
        if not 1 <= m_core <= n:
            raise ParameterError(f"M/N value {fraction:g} gives core size {m_core} outside [1, n]")
        if family == "octopus":
            net = graphs.octopus(n, m_core, p_core, seed=mix64(seed, c, _GRAPH_TAG))
        else:
            net = graphs.mixed_core(n, m_core)
        run_seeds = [mix64(seed, c, r) for r in range(ensemble)]
        results = dynamics.simulate_ensemble(net, params, steps=steps, burn_in=burn_in,
                                             seeds=run_seeds, snapshot_every=snapshot_every)
        triplets: dict[str, list[float | None]] = {"d": [], "w": [], "dw": []}
        for res in results:
            states = res.snapshots if res.snapshots else [res.final]
            reports = [correlation_report(net, st) for st in states]
            for key, pick in (("d", "r_degree"), ("w", "r_wealth"), ("dw", "r_degree_wealth")):
                vals = [v for v in (getattr(rep, pick) for rep in reports) if v is not None]
                triplets[key].append(float(np.mean(vals)) if vals else None)
        mean_d, se_d = _mean_se(triplets["d"])
        mean_w, se_w = _mean_se(triplets["w"])
        mean_dw, se_dw = _mean_se(triplets["dw"])
        rows.append(
            SweepRow(
                m_over_n=float(fraction),
                r_degree=mean_d, r_wealth=mean_w, r_degree_wealth=mean_dw,
                se_degree=se_d, se_wealth=se_w, se_degree_wealth=se_dw,
                n_runs=ensemble,
            )
        )
    return rows
