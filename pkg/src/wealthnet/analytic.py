"""Closed-form wealth distributions: densities, CCDFs and exact samplers.

Three families cover the regimes the exchange process produces:

* Pareto tail          p(w) = alpha * w_star^alpha / w^(1+alpha),  w >= w_star
* log-normal body      p(w) = beta / (w sqrt(pi)) * exp(-beta^2 log^2(w / w0))
* mean-field law       p(w) = (alpha-1)^alpha / Gamma(alpha)
                              * exp((1-alpha)/w) / w^(1+alpha)

The mean-field law is the stationary distribution of normalized wealth on
the fully connected network, an inverse-gamma with shape alpha and scale
alpha - 1 (so its mean is exactly 1); alpha = 1 + J/sigma^2.  A convex
mixture of a tail and a body family describes core-periphery populations,
weighted by the core fraction.

These functions double as the oracle layer for the fitting code, so they
are kept free of any dependency on the simulation modules.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammainc, gammaln

from .errors import ParameterError


@dataclass(frozen=True)
class ParetoParams:
    """Tail index alpha > 0 and threshold w_star > 0 (density exponent 1+alpha)."""

    alpha: float
    w_star: float

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ParameterError("Pareto index alpha must be positive")
        if self.w_star <= 0:
            raise ParameterError("Pareto threshold w_star must be positive")


@dataclass(frozen=True)
class GibratParams:
    """Log-normal body: index beta = 1/sqrt(2 s^2), median w0; s^2 = log-variance."""

    beta: float
    w0: float

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ParameterError("Gibrat index beta must be positive")
        if self.w0 <= 0:
            raise ParameterError("Gibrat scale w0 must be positive")

    @property
    def s2(self) -> float:
        return 1.0 / (2.0 * self.beta * self.beta)

    @classmethod
    def from_log_moments(cls, log_mean: float, log_var: float) -> "GibratParams":
        if log_var <= 0:
            raise ParameterError("log-variance must be positive")
        return cls(beta=1.0 / math.sqrt(2.0 * log_var), w0=math.exp(log_mean))


@dataclass(frozen=True)
class MeanFieldParams:
    """Stationary normalized-wealth law on the complete graph; alpha > 1."""

    alpha: float

    def __post_init__(self) -> None:
        if self.alpha <= 1:
            raise ParameterError("mean-field law requires alpha > 1 (non-normalizable otherwise)")

    @classmethod
    def from_coupling(cls, j: float, sigma2: float) -> "MeanFieldParams":
        return cls(alpha=1.0 + j / sigma2)


@dataclass(frozen=True)
class MixtureParams:
    """Convex mixture: weight core_fraction on the tail component."""

    core_fraction: float
    tail: MeanFieldParams | ParetoParams
    body: GibratParams

    def __post_init__(self) -> None:
        if not 0.0 <= self.core_fraction <= 1.0:
            raise ParameterError("core_fraction must be in [0, 1]")


def _as_array(w, positive: bool) -> np.ndarray:
    arr = np.asarray(w, dtype=float)
    if positive and np.any(arr <= 0):
        raise ParameterError("wealth argument must be positive")
    if not positive and np.any(arr < 0):
        raise ParameterError("wealth argument must be nonnegative")
    return arr


def _shaped(res: np.ndarray, like) -> np.ndarray | float:
    return float(res) if np.isscalar(like) or np.ndim(like) == 0 else res


# ---------------------------------------------------------------------------
# Pareto


def pareto_pdf(w, p: ParetoParams):
    arr = _as_array(w, positive=False)
    with np.errstate(divide="ignore"):
        logpdf = math.log(p.alpha) + p.alpha * math.log(p.w_star) - (1 + p.alpha) * np.log(
            np.where(arr > 0, arr, 1.0)
        )
    res = np.where(arr >= p.w_star, np.exp(logpdf), 0.0)
    return _shaped(res, w)


def pareto_ccdf(w, p: ParetoParams):
    arr = _as_array(w, positive=False)
    ratio = np.where(arr > 0, p.w_star / np.where(arr > 0, arr, 1.0), np.inf)
    res = np.where(arr >= p.w_star, np.minimum(ratio, 1.0) ** p.alpha, 1.0)
    return _shaped(res, w)


# ---------------------------------------------------------------------------
# Gibrat (log-normal)


def gibrat_pdf(w, p: GibratParams):
    arr = _as_array(w, positive=True)
    x = np.log(arr / p.w0)
    res = p.beta / (arr * math.sqrt(math.pi)) * np.exp(-(p.beta * x) ** 2)
    return _shaped(res, w)


def gibrat_ccdf(w, p: GibratParams):
    arr = _as_array(w, positive=True)
    res = 0.5 * erfc(p.beta * np.log(arr / p.w0))
    return _shaped(res, w)


# ---------------------------------------------------------------------------
# Mean-field stationary law (inverse-gamma, mean 1)


def meanfield_pdf(w, p: MeanFieldParams):
    arr = _as_array(w, positive=True)
    a = p.alpha
    logpdf = a * math.log(a - 1.0) - gammaln(a) + (1.0 - a) / arr - (1.0 + a) * np.log(arr)
    return _shaped(np.exp(logpdf), w)


def meanfield_ccdf(w, p: MeanFieldParams):
    arr = _as_array(w, positive=True)
    # P(W > w) = P(Gamma(alpha) < (alpha-1)/w), regularized lower incomplete gamma
    res = gammainc(p.alpha, (p.alpha - 1.0) / arr)
    return _shaped(res, w)


# ---------------------------------------------------------------------------
# Mixture


def _tail_pdf(w, tail):
    return meanfield_pdf(w, tail) if isinstance(tail, MeanFieldParams) else pareto_pdf(w, tail)


def _tail_ccdf(w, tail):
    return meanfield_ccdf(w, tail) if isinstance(tail, MeanFieldParams) else pareto_ccdf(w, tail)


def mixture_pdf(w, p: MixtureParams):
    cf = p.core_fraction
    if cf == 0.0:
        return gibrat_pdf(w, p.body)
    if cf == 1.0:
        return _tail_pdf(w, p.tail)
    return cf * _tail_pdf(w, p.tail) + (1.0 - cf) * gibrat_pdf(w, p.body)


def mixture_ccdf(w, p: MixtureParams):
    cf = p.core_fraction
    if cf == 0.0:
        return gibrat_ccdf(w, p.body)
    if cf == 1.0:
        return _tail_ccdf(w, p.tail)
    return cf * _tail_ccdf(w, p.tail) + (1.0 - cf) * gibrat_ccdf(w, p.body)


# ---------------------------------------------------------------------------
# Samplers


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def pareto_inverse_ccdf(u, p: ParetoParams):
    """Map a uniform variate u in (0, 1] to a Pareto sample w_star * u^(-1/alpha)."""
    return p.w_star * np.asarray(u, dtype=float) ** (-1.0 / p.alpha)


def sample_pareto(p: ParetoParams, count: int, seed=0) -> np.ndarray:
    if count < 1:
        raise ParameterError("count must be >= 1")
    u = 1.0 - _rng(seed).random(count)  # in (0, 1]
    return pareto_inverse_ccdf(u, p)


def sample_gibrat(p: GibratParams, count: int, seed=0) -> np.ndarray:
    if count < 1:
        raise ParameterError("count must be >= 1")
    s = math.sqrt(p.s2)
    return p.w0 * np.exp(s * _rng(seed).standard_normal(count))


def sample_meanfield(p: MeanFieldParams, count: int, seed=0) -> np.ndarray:
    if count < 1:
        raise ParameterError("count must be >= 1")
    g = _rng(seed).gamma(shape=p.alpha, scale=1.0, size=count)
    return (p.alpha - 1.0) / g


def sample_mixture(p: MixtureParams, count: int, seed=0) -> np.ndarray:
    if count < 1:
        raise ParameterError("count must be >= 1")
    rng = _rng(seed)
    from_tail = rng.random(count) < p.core_fraction
    out = np.empty(count)
    n_tail = int(from_tail.sum())
    if n_tail:
        if isinstance(p.tail, MeanFieldParams):
            out[from_tail] = sample_meanfield(p.tail, n_tail, rng)
        else:
            out[from_tail] = sample_pareto(p.tail, n_tail, rng)
    if n_tail < count:
        out[~from_tail] = sample_gibrat(p.body, count - n_tail, rng)
    return out
