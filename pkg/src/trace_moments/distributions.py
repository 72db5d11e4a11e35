"""Closed-form laws of the first two traces ``t1 = sum l``, ``t2 = sum l^2``.

With ``p = (beta N^2 + (2 - beta) N - 6) / 4`` the joint density is

    Q(t1, t2) = (t2 - t1^2/N)^p exp(-beta t2 / 2) / Norm,   t2 > t1^2/N,
    Norm      = Gamma(p+1) (2/beta)^(p+1) sqrt(2 pi N / beta).

In ``u = t2 - t1^2/N``, ``v = t1`` it factorizes into ``v ~ Normal(0, N/beta)``
and ``u ~ Gamma(p+1, scale 2/beta)``.  All densities are returned as natural
logarithms.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .algebra import discriminant
from .core import EnsembleParams, RngStream, TraceVector
from .errors import InvalidExponent, NonPositiveT2
from .sampling import sample_chi_batch
from .special import lgamma

__all__ = [
    "log_normalization",
    "log_q_t1_t2",
    "log_q_t1",
    "log_q_t2",
    "sample_t1_t2_exact",
    "mixed_moment",
    "mixed_moment_raw",
    "mean_t2",
    "log_trace_jpdf_unnormalized",
]

_LOG_PI = math.log(math.pi)


def log_normalization(params: EnsembleParams) -> float:
    p = params.require_exponent(1.0)
    n, beta = params.n_dim, params.beta
    return (
        lgamma(p + 1.0)
        + (p + 1.0) * math.log(2.0 / beta)
        + 0.5 * math.log(2.0 * math.pi * n / beta)
    )


def log_q_t1_t2(params: EnsembleParams, t1: float, t2: float) -> float:
    """Log of the joint density of ``(t1, t2)``.

    Off the support (``t2 < t1^2/N``) the result is ``-inf``.  On the
    parabola itself it is ``-inf`` for ``p > 0``, ``-lnNorm - beta t2/2``
    for ``p = 0`` and ``+inf`` for ``-1 < p < 0`` (integrable singularity).
    """
    p = params.require_exponent(1.0)
    n, beta = params.n_dim, params.beta
    u = math.fsum([t2, -t1 * t1 / n])
    if u < 0:
        return -math.inf
    if u == 0:
        if p > 0:
            return -math.inf
        if p < 0:
            return math.inf
        return -log_normalization(params) - 0.5 * beta * t2
    return p * math.log(u) - 0.5 * beta * t2 - log_normalization(params)


def log_q_t1(params: EnsembleParams, t1: float) -> float:
    """Normal(0, N/beta) log-density of ``t1``."""
    n, beta = params.n_dim, params.beta
    return 0.5 * math.log(beta / (2.0 * math.pi * n)) - beta * t1 * t1 / (2.0 * n)


def log_q_t2(params: EnsembleParams, t2: float) -> float:
    """Log-density of ``t2``: ``beta t2`` is Gamma(shape p+3/2, scale 2)."""
    p = params.require_exponent(1.5)
    if not t2 > 0:
        raise NonPositiveT2(f"t2 must be positive, got {t2!r}")
    beta = params.beta
    a = p + 1.5
    return a * math.log(beta / 2.0) - lgamma(a) - 0.5 * beta * t2 + (p + 0.5) * math.log(t2)


def sample_t1_t2_exact(params: EnsembleParams, rng: RngStream, size: Optional[int] = None):
    """Exact draws of ``(t1, t2)`` through the ``(u, v)`` factorization.

    ``u`` is drawn as ``chi_{2p+2}^2 / beta`` (Gamma(p+1) with scale
    ``2/beta``) and ``v`` as Normal(0, N/beta).  Returns two floats, or two
    arrays when ``size`` is given.
    """
    p = params.require_exponent(1.0)
    n, beta = params.n_dim, params.beta
    m = 1 if size is None else size
    v = rng.normal(math.sqrt(n / beta), m)
    u = sample_chi_batch(2.0 * p + 2.0, rng, m) ** 2 / beta
    t1 = v
    t2 = u + v * v / n
    if size is None:
        return float(t1[0]), float(t2[0])
    return t1, t2


def _log_mixed_moment(params, k, n_pow):
    p = params.require_exponent(1.0)
    if k < 0 or n_pow < 0 or int(k) != k or int(n_pow) != n_pow:
        raise ValueError("moment orders must be non-negative integers")
    if not p + k + 1.5 > 0:
        raise InvalidExponent(f"p + k + 3/2 must be positive (p={p:g}, k={k})")
    n, beta = params.n_dim, params.beta
    return (
        k * math.log(n)
        - 0.5 * _LOG_PI
        + (k + n_pow) * math.log(2.0 / beta)
        + lgamma(k + 0.5)
        + lgamma(k + n_pow + p + 1.5)
        - lgamma(k + p + 1.5)
    )


def mixed_moment(params: EnsembleParams, k: int, n: int) -> float:
    """``E[t1^(2k) t2^n]`` (odd powers of ``t1`` have zero mean).

    The Gamma ratios reduce to finite products for integer orders, which
    keeps small moments exact (``E[1] = 1``, ``E[t2] = N^2/2`` at
    ``beta = 2``).  Falls back to log-gamma when the product overflows.
    """
    log_val = _log_mixed_moment(params, k, n)  # validates the arguments
    n_dim, beta = params.n_dim, params.beta
    a = k + params.p + 1.5
    # Gamma(k+1/2)/sqrt(pi) = (2k-1)!!/2^k ; Gamma(a+n)/Gamma(a) = a(a+1)...(a+n-1)
    val = math.prod(range(2 * k - 1, 0, -2)) / 2.0**k
    val *= math.prod(a + j for j in range(n))
    val *= n_dim**k * (2.0 / beta) ** (k + n)
    if math.isfinite(val) and val > 0:
        return val
    return math.exp(log_val)


def mixed_moment_raw(params: EnsembleParams, m: int, n: int) -> float:
    """``E[t1^m t2^n]`` for any non-negative ``m``."""
    if m % 2:
        params.require_exponent(1.0)
        return 0.0
    return mixed_moment(params, m // 2, n)


def mean_t2(params: EnsembleParams) -> float:
    n, beta = params.n_dim, params.beta
    return n * n / 2.0 + (2.0 - beta) * n / (2.0 * beta)


def log_trace_jpdf_unnormalized(params: EnsembleParams, t: TraceVector) -> float:
    """``(beta - 1) ln|G(t)| - beta t2/2`` inside the discriminant domain.

    The normalization constant is omitted.  Off the domain the value is
    ``-inf``.  On the boundary ``|G| = 0``: the result is ``-inf`` for
    ``beta > 1`` and ``+inf`` for ``beta < 1``; for ``beta = 1`` the
    discriminant drops out entirely.
    """
    n, beta = params.n_dim, params.beta
    if t.n_dim != n or len(t) < n:
        raise ValueError(f"expected a trace vector with t_1..t_{n} for N={n}")
    if n == 1:
        t2 = t.values[0] ** 2
    else:
        t2 = t.values[1]
    d = discriminant(t.head(n))
    if not d.chi:
        return -math.inf
    if beta == 1.0:
        return -0.5 * t2
    if math.isinf(d.log_abs_G):
        return -math.inf if beta > 1.0 else math.inf
    return (beta - 1.0) * d.log_abs_G - 0.5 * beta * t2
