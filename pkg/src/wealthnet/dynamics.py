"""Stochastic wealth-exchange dynamics on a network.

The coupled process evolves every vertex's wealth by independent Gaussian
multiplicative noise (mean drift ``m``, variance ``2*sigma2`` per unit time,
Stratonovich convention) plus linear exchange along edges.  Two coupling
conventions are supported:

* ``"uniform"``:  J_ij = (J/N) a_ij -- every edge carries the same rate.
* ``"degree"``:   J_ij = J a_ij / k_i -- inflow normalized by the receiving
  vertex's degree (isolated vertices get zero coupling).

The default integrator is a Strang-style splitting: an exact geometric
half-update, an explicit-Euler exchange, and a second geometric half-update
with fresh Gaussians.  The multiplicative part is integrated exactly, so it
preserves positivity unconditionally; the exchange sub-step preserves
positivity under the stability bound checked at every step.  An Euler-Heun
predictor-corrector is provided as an independent cross-check scheme.

Noise is drawn from per-vertex counter-based substreams (stream id = vertex
index), so a vertex's noise sequence depends only on (seed, vertex).
Ensembles integrate as columns of one state matrix; per-column arithmetic is
bit-identical to running each member alone (a tested invariant), so batching
is purely an optimization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np
from scipy.optimize import brentq

from .errors import NumericalError, ParameterError
from .graphs import Network
from .seeding import VertexStreams, mix64, stream_generator

COUPLING_UNIFORM = "uniform"
COUPLING_DEGREE = "degree"

_kernel_cache: dict[int, object] = {}


def _neighbor_sum_kernel(width: int):
    """Row-parallel CSR neighbor-sum kernel specialized to a batch width.

    Within a row the additions run in index order, one thread per row, so
    the result is bit-identical to a fully sequential evaluation and each
    column is independent of the batch width.
    """
    if width not in _kernel_cache:

        @numba.njit(parallel=True, boundscheck=False)
        def kern(indptr, indices, W, out):
            for i in numba.prange(W.shape[0]):
                acc = np.zeros(width)
                for jj in range(indptr[i], indptr[i + 1]):
                    j = indices[jj]
                    for r in range(width):
                        acc[r] += W[j, r]
                for r in range(width):
                    out[i, r] = acc[r]

        _kernel_cache[width] = kern
    return _kernel_cache[width]


@dataclass(frozen=True)
class BMParams:
    """Parameters of the coupled wealth-exchange process.

    ``m`` is the drift of the multiplicative noise per unit time and
    ``sigma2`` half its variance (the noise has variance ``2*sigma2``).
    ``j`` is the exchange strength, interpreted per ``coupling``.
    """

    m: float
    sigma2: float
    j: float
    coupling: str = COUPLING_UNIFORM
    dt: float = 0.01

    def validate(self) -> None:
        if self.sigma2 <= 0:
            raise ParameterError("sigma2 must be positive")
        if self.j < 0:
            raise ParameterError("coupling strength J must be nonnegative")
        if self.dt <= 0:
            raise ParameterError("dt must be positive")
        if self.coupling not in (COUPLING_UNIFORM, COUPLING_DEGREE):
            raise ParameterError(f"unknown coupling convention {self.coupling!r}")


@dataclass
class WealthState:
    """Per-vertex positive wealth plus model time.

    Long runs with positive drift overflow double precision (m = 1 exceeds
    the exponent range near t ~ 700), so integration periodically recenters
    the stored values by an exact power of two and accumulates the shifted
    exponent in ``log2_scale``: the physical wealth is w * 2**log2_scale.
    Power-of-two scaling is exact in IEEE arithmetic, so normalized wealth
    is bit-for-bit unaffected by the recentering.
    """

    w: np.ndarray
    t: float = 0.0
    log2_scale: int = 0

    def validate(self, n: int | None = None) -> None:
        if n is not None and len(self.w) != n:
            raise ParameterError("state size does not match network size")
        if not np.all(np.isfinite(self.w)) or np.any(self.w <= 0):
            raise ParameterError("wealth must be positive and finite")

    def normalized(self) -> np.ndarray:
        """Wealth rescaled to its population mean (exponent offset cancels)."""
        return self.w / self.w.mean()

    def log_wealth(self) -> np.ndarray:
        """log of physical wealth, including the exponent offset."""
        return np.log(self.w) + self.log2_scale * math.log(2.0)


@dataclass(frozen=True)
class NoiseSpec:
    """Per-step noise for the single-agent reference processes.

    The multiplicative factor is log-normal: log eta ~ N(mu, s^2).  An
    optional additive Gaussian term xi and an optional wealth floor w_min
    select the process variant.
    """

    mu: float
    s: float
    xi_mean: float = 0.0
    xi_sd: float = 0.0
    w_min: float | None = None

    def validate(self) -> None:
        if self.s <= 0:
            raise ParameterError("log-noise scale s must be positive")
        if self.w_min is not None and self.w_min <= 0:
            raise ParameterError("wealth floor w_min must be positive")

    @property
    def has_additive(self) -> bool:
        return self.xi_mean != 0.0 or self.xi_sd != 0.0


class _Exchange:
    """Precomputed exchange operator: rate(W) = inflow - outflow per vertex.

    Operates on batched state matrices of shape (n, runs); a single run is
    the width-1 batch.
    """

    def __init__(self, net: Network, params: BMParams):
        self.net = net
        self.params = params
        adj = net.adjacency
        self._indptr = adj.indptr.astype(np.int64)
        self._indices = adj.indices.astype(np.int64)
        if params.coupling == COUPLING_DEGREE:
            inv_k = np.zeros(net.n)
            nz = net.degree > 0
            inv_k[nz] = 1.0 / net.degree[nz]
            self._inv_k = inv_k[:, None]
            self._out_coeff = (adj @ inv_k)[:, None]  # sum_j a_ij / k_j
        else:
            self._degree_f = net.degree.astype(float)[:, None]

    def check_stable(self, step: int | None = None) -> None:
        p = self.params
        if p.coupling == COUPLING_UNIFORM:
            ok = p.dt * p.j * self.net.degree_max / max(self.net.n, 1) < 1.0
        else:
            ok = p.dt * p.j < 1.0
        if not ok:
            raise NumericalError("stability bound violated for the exchange sub-step", step)

    def neighbor_sums(self, W: np.ndarray) -> np.ndarray:
        out = np.empty_like(W)
        _neighbor_sum_kernel(W.shape[1])(self._indptr, self._indices, W, out)
        return out

    def rate(self, W: np.ndarray) -> np.ndarray:
        p = self.params
        aw = self.neighbor_sums(W)
        if p.coupling == COUPLING_UNIFORM:
            return (p.j / self.net.n) * (aw - self._degree_f * W)
        return p.j * (self._inv_k * aw - self._out_coeff * W)


def exchange_rate(net: Network, params: BMParams, w: np.ndarray) -> np.ndarray:
    """dw/dt of the exchange term alone, for a single state vector."""
    params.validate()
    return _Exchange(net, params).rate(np.ascontiguousarray(w, dtype=float)[:, None])[:, 0]


def _check_positive(W: np.ndarray, step: int | None) -> None:
    lo = W.min() if W.size else 1.0
    if not (lo > 0.0) or not np.isfinite(W.max()):
        raise NumericalError("wealth left the positive domain", step)


def _split_update(W: np.ndarray, z: np.ndarray, exch: _Exchange) -> np.ndarray:
    p = exch.params
    mu_half = 0.5 * p.m * p.dt
    sig_half = math.sqrt(p.sigma2 * p.dt)  # variance 2*sigma2 over dt/2
    W = W * np.exp(mu_half + sig_half * z[0])
    W = W + p.dt * exch.rate(W)
    W = W * np.exp(mu_half + sig_half * z[1])
    return W


def _heun_update(W: np.ndarray, z: np.ndarray, exch: _Exchange) -> np.ndarray:
    p = exch.params
    g = math.sqrt(2.0 * p.sigma2)
    dw = math.sqrt(p.dt) * z[0]
    f0 = p.m * W + exch.rate(W)
    pred = W + f0 * p.dt + g * W * dw
    f1 = p.m * pred + exch.rate(pred)
    return W + 0.5 * (f0 + f1) * p.dt + 0.5 * g * (W + pred) * dw


_SCHEMES = {"split": (_split_update, 2), "heun": (_heun_update, 1)}

_RESCALE_INTERVAL = 4096  # steps between exponent-recentering checkpoints


def _recenter(col: np.ndarray) -> int:
    """Rescale one run's wealth by an exact power of two when its magnitude
    drifts far from 1; returns the exponent shift (0 when left alone)."""
    top = math.frexp(float(col.max()))[1]  # max is in [2**(top-1), 2**top)
    if abs(top) <= 64:
        return 0
    # keep the smallest value comfortably inside the normal range
    bottom = math.frexp(float(col.min()))[1]
    shift = min(top, bottom + 960)
    if shift:
        col *= 2.0 ** (-shift)
    return shift


def step_split(
    state: WealthState, net: Network, params: BMParams, rng: VertexStreams
) -> WealthState:
    """One Strang-splitting step; consumes two normals per vertex."""
    return _step(state, net, params, rng, "split")


def step_heun(
    state: WealthState, net: Network, params: BMParams, rng: VertexStreams
) -> WealthState:
    """One Euler-Heun predictor-corrector step; consumes one normal per vertex."""
    return _step(state, net, params, rng, "heun")


def _step(
    state: WealthState, net: Network, params: BMParams, rng: VertexStreams, scheme: str
) -> WealthState:
    params.validate()
    state.validate(net.n)
    update, per_step = _SCHEMES[scheme]
    exch = _Exchange(net, params)
    step = int(round(state.t / params.dt)) + 1
    exch.check_stable(step)
    z = rng.normal_block(per_step)[:, :, None]
    W = update(state.w[:, None], z, exch)
    _check_positive(W, step)
    return WealthState(w=W[:, 0], t=state.t + params.dt, log2_scale=state.log2_scale)


@dataclass
class SimulationResult:
    final: WealthState
    snapshots: list[WealthState] = field(default_factory=list)


def simulate(
    net: Network,
    params: BMParams,
    steps: int,
    burn_in: int = 0,
    seed: int = 0,
    init: np.ndarray | None = None,
    snapshot_every: int | None = None,
    scheme: str = "split",
) -> SimulationResult:
    """Integrate the exchange process for ``steps`` steps.

    Snapshots, if requested, are taken every ``snapshot_every`` steps
    strictly after ``burn_in``.  Fully deterministic given ``seed``; raw
    wealth evolves freely (normalization happens on demand).
    """
    return simulate_ensemble(
        net, params, steps, burn_in=burn_in, seeds=[seed], init=init,
        snapshot_every=snapshot_every, scheme=scheme,
    )[0]


def simulate_ensemble(
    net: Network,
    params: BMParams,
    steps: int,
    seeds: Sequence[int],
    burn_in: int = 0,
    init: np.ndarray | None = None,
    snapshot_every: int | None = None,
    scheme: str = "split",
) -> list[SimulationResult]:
    """Integrate one run per seed, batched as columns of a state matrix.

    Column r evolves exactly as ``simulate(..., seed=seeds[r])`` would,
    bit for bit; batching only amortizes the per-step sparse traversal.
    """
    params.validate()
    if steps < burn_in or burn_in < 0:
        raise ParameterError("need steps >= burn_in >= 0")
    if snapshot_every is not None and snapshot_every < 1:
        raise ParameterError("snapshot_every must be >= 1")
    if scheme not in _SCHEMES:
        raise ParameterError(f"unknown scheme {scheme!r}")
    if not seeds:
        return []
    update, per_step = _SCHEMES[scheme]
    runs = len(seeds)
    if init is None:
        W = np.ones((net.n, runs))
    else:
        w0 = np.asarray(init, dtype=float)
        WealthState(w0).validate(net.n)
        W = np.ascontiguousarray(np.repeat(w0[:, None], runs, axis=1))

    exch = _Exchange(net, params)
    exch.check_stable()
    streams = [VertexStreams(s, net.n) for s in seeds]
    z = np.empty((per_step, net.n, runs))
    snapshots: list[list[WealthState]] = [[] for _ in seeds]
    offsets = [0] * runs
    for s in range(1, steps + 1):
        for r, st in enumerate(streams):
            z[:, :, r] = st.normal_block(per_step)
        W = update(W, z, exch)
        _check_positive(W, s)
        if s % _RESCALE_INTERVAL == 0:
            for r in range(runs):
                offsets[r] += _recenter(W[:, r])
        if snapshot_every is not None and s > burn_in and (s - burn_in) % snapshot_every == 0:
            for r in range(runs):
                snapshots[r].append(
                    WealthState(w=W[:, r].copy(), t=s * params.dt, log2_scale=offsets[r])
                )
    t_final = steps * params.dt
    return [
        SimulationResult(
            final=WealthState(w=W[:, r].copy(), t=t_final, log2_scale=offsets[r]),
            snapshots=snapshots[r],
        )
        for r in range(runs)
    ]


# ---------------------------------------------------------------------------
# Single-agent reference processes


def multiplicative_reference(
    noise: NoiseSpec, steps: int, seed: int = 0, stream: int = 0, w0: float = 1.0
) -> np.ndarray:
    """Sample path of the purely multiplicative process w' = eta * w.

    With a wealth floor set, each step applies w' = max(eta * w, w_min).
    Returns the path including the initial value (length steps + 1).
    """
    noise.validate()
    if noise.has_additive:
        raise ParameterError("multiplicative reference admits no additive term")
    z = stream_generator(seed, stream).standard_normal(steps)
    etas = np.exp(noise.mu + noise.s * z).tolist()
    path = np.empty(steps + 1)
    path[0] = w = float(w0)
    floor = noise.w_min
    for k, eta in enumerate(etas, start=1):
        w = eta * w
        if floor is not None and w < floor:
            w = floor
        path[k] = w
    return path


_XI_SEED_TAG = 0xA11

def additive_reference(
    noise: NoiseSpec, steps: int, seed: int = 0, stream: int = 0, w0: float = 1.0
) -> np.ndarray:
    """Sample path of w' = eta * w + xi (stationary only for E[log eta] < 0).

    eta and xi draw from separate substreams, so a degenerate xi reproduces
    multiplicative_reference(noise without floor) draw for draw.
    """
    noise.validate()
    if noise.mu >= 0:
        raise ParameterError("additive reference requires E[log eta] < 0 (non-stationary regime)")
    z_eta = stream_generator(seed, stream).standard_normal(steps)
    z_xi = stream_generator(mix64(seed, _XI_SEED_TAG), stream).standard_normal(steps)
    etas = np.exp(noise.mu + noise.s * z_eta).tolist()
    xis = (noise.xi_mean + noise.xi_sd * z_xi).tolist()
    path = np.empty(steps + 1)
    path[0] = w = float(w0)
    for k in range(steps):
        w = etas[k] * w + xis[k]
        path[k + 1] = w
    return path


def pareto_index_condition(noise: NoiseSpec) -> float:
    """Positive root alpha of E[eta^alpha] = 1 for log-normal eta.

    log E[eta^a] = a*mu + a^2 s^2 / 2, so the root is -2 mu / s^2; it is
    located numerically and must agree with that closed form.
    """
    noise.validate()
    if noise.mu >= 0:
        raise ParameterError("tail condition has no positive root for mu >= 0")

    def log_moment(a: float) -> float:
        return a * noise.mu + 0.5 * a * a * noise.s * noise.s

    hi = 2.0 * (-2.0 * noise.mu / (noise.s * noise.s))
    return float(brentq(log_moment, 1e-12, hi, xtol=1e-14, rtol=8.9e-16))
