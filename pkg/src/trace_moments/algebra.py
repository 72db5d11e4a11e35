"""Deterministic trace algebra.

Power sums from spectra and matrices, Newton's identities, the recurrence
extending ``t_1..t_N`` to higher traces, the Hankel (moment) matrix
``V V^T`` and its log-determinant, and the shift/scale transforms of the
trace coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .core import (
    DENSE_COMPLEX,
    DENSE_REAL,
    MatrixSample,
    Spectrum,
    TraceVector,
    power_sum,
)
from .errors import DegenerateScale, InsufficientTraces

__all__ = [
    "SecularCoefficients",
    "HankelMatrix",
    "DiscriminantValue",
    "INTERIOR",
    "BOUNDARY",
    "EXTERIOR",
    "traces_from_spectrum",
    "traces_from_matrix",
    "traces_of_tridiagonal_batch",
    "traces_of_dense_batch",
    "newton_coefficients",
    "extend_traces",
    "hankel_matrix",
    "discriminant",
    "in_domain",
    "shift_traces",
    "scale_traces",
    "standardize_traces",
    "log_vandermonde",
    "classify_batch",
]

INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"

DEFAULT_TOL = 1e-13
# batch rows with a pivot below this are redone with the pivoted routine
_REFINE_PIVOT = 1e-8
# relative spread below which a spectrum counts as fully degenerate
_DEGENERATE_SPREAD = 1e-12

# working precision of the discriminant chain (80-bit on x86-64 Linux)
_WORK = np.longdouble
_ZERO = _WORK(0)
_ONE = _WORK(1)


@dataclass(frozen=True)
class SecularCoefficients:
    """Coefficients of ``det(xI - M) = sum_k c_k x^(N-k)``, with ``c_0 = 1``."""

    n_dim: int
    c: tuple

    def __post_init__(self):
        if len(self.c) != self.n_dim + 1 or self.c[0] != 1.0:
            raise ValueError("expected N+1 coefficients with c_0 = 1")

    def __call__(self, x: float) -> float:
        """Evaluate the characteristic polynomial at ``x`` (Horner)."""
        acc = 0.0
        for ck in self.c:
            acc = acc * x + ck
        return acc


@dataclass(frozen=True)
class HankelMatrix:
    n_dim: int
    entries: np.ndarray


@dataclass(frozen=True)
class DiscriminantValue:
    """Domain classification of a trace vector and ``ln|G|``.

    ``log_abs_G`` is half the log-determinant of the Hankel matrix, finite
    only for interior points.
    """

    classification: str
    log_abs_G: float
    pivots: tuple = ()

    @property
    def chi(self) -> bool:
        return self.classification != EXTERIOR


def _as_spectrum_values(s: Union[Spectrum, Sequence[float]]):
    return s.values if isinstance(s, Spectrum) else tuple(float(v) for v in s)


def traces_from_spectrum(s: Union[Spectrum, Sequence[float]], r_max: int) -> TraceVector:
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    vals = _as_spectrum_values(s)
    return TraceVector(len(vals), tuple(power_sum(vals, r) for r in range(1, r_max + 1)))


def _times_tridiagonal(p, d, e):
    # P @ T for symmetric tridiagonal T; the band of P grows by one per call
    out = p * d[np.newaxis, :]
    out[:, 1:] += p[:, :-1] * e[np.newaxis, :]
    out[:, :-1] += p[:, 1:] * e[np.newaxis, :]
    return out


def traces_from_matrix(m: MatrixSample, r_max: int) -> TraceVector:
    """``tr(M^r)`` for ``r = 1..r_max`` by iterated multiplication."""
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    out = []
    if m.kind in (DENSE_REAL, DENSE_COMPLEX):
        a = np.asarray(m.matrix)
        p = a
        for r in range(1, r_max + 1):
            out.append(float(np.real(np.trace(p))))
            if r < r_max:
                p = p @ a
    else:
        d = np.asarray(m.diag, dtype=float)
        e = np.asarray(m.offdiag, dtype=float)
        p = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
        for r in range(1, r_max + 1):
            out.append(math.fsum(np.diag(p)))
            if r < r_max:
                p = _times_tridiagonal(p, d, e)
    return TraceVector(m.n_dim, tuple(out))


def traces_of_tridiagonal_batch(diag: np.ndarray, offdiag: np.ndarray, r_max: int) -> np.ndarray:
    """Traces ``t_1..t_r_max`` for a stack of tridiagonal matrices.

    ``diag`` has shape ``(B, N)``, ``offdiag`` shape ``(B, N-1)``; returns ``(B, r_max)``.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    out = np.empty((diag.shape[0], r_max))
    out[:, 0] = diag.sum(axis=1)
    if r_max >= 2:
        out[:, 1] = (diag**2).sum(axis=1) + 2.0 * (offdiag**2).sum(axis=1)
    if r_max >= 3:
        n = diag.shape[1]
        mats = np.zeros((diag.shape[0], n, n))
        idx = np.arange(n)
        mats[:, idx, idx] = diag
        mats[:, idx[:-1], idx[1:]] = offdiag
        mats[:, idx[1:], idx[:-1]] = offdiag
        out[:, 2:] = traces_of_dense_batch(mats, r_max)[:, 2:]
    return out


def traces_of_dense_batch(mats: np.ndarray, r_max: int) -> np.ndarray:
    """Traces ``t_1..t_r_max`` for a stack ``(B, N, N)`` of self-adjoint matrices."""
    mats = np.asarray(mats)
    out = np.empty((mats.shape[0], r_max))
    p = mats
    for r in range(r_max):
        out[:, r] = np.real(np.trace(p, axis1=1, axis2=2))
        if r + 1 < r_max:
            p = p @ mats
    return out


def _newton_work(vals, n):
    c = [_ONE]
    for k in range(1, n + 1):
        acc = _ZERO
        for i in range(1, k + 1):
            acc += c[k - i] * vals[i - 1]
        c.append(-acc / k)
    return c


def _extended_work(t: TraceVector, length: int):
    """``[t_0, ..., t_length]`` in working precision, extending by recurrence."""
    n = t.n_dim
    if len(t) < min(n, length):
        raise InsufficientTraces(f"need at least t_1..t_{n}, got {len(t)}")
    full = [_WORK(n)] + [_WORK(v) for v in t.values[:length]]
    if len(full) > length:
        return full
    c = _newton_work(full[1:], n)
    while len(full) <= length:
        m = len(full)
        acc = _ZERO
        for k in range(1, n + 1):
            acc += c[k] * full[m - k]
        full.append(-acc)
    return full


def newton_coefficients(t: TraceVector) -> SecularCoefficients:
    """Secular coefficients from power sums via ``k c_k = -sum_i c_{k-i} t_i``."""
    n = t.n_dim
    if len(t) < n:
        raise InsufficientTraces(f"need t_1..t_{n}, got {len(t)} traces")
    c = _newton_work([_WORK(v) for v in t.values[:n]], n)
    return SecularCoefficients(n, tuple(float(v) for v in c))


def extend_traces(t: TraceVector, r_extra: int) -> TraceVector:
    """Append ``t_{N+1} .. t_{N+r_extra}`` using ``t_{N+r} = -sum_k c_k t_{N+r-k}``."""
    n = t.n_dim
    if r_extra < 0:
        raise ValueError("r_extra must be non-negative")
    if len(t) < n:
        raise InsufficientTraces(f"need t_1..t_{n}, got {len(t)} traces")
    full = _extended_work(t.head(n), n + r_extra)
    return TraceVector(n, tuple(float(v) for v in full[1:]))


def hankel_matrix(t: TraceVector) -> HankelMatrix:
    n = t.n_dim
    if len(t) < 2 * n - 2:
        raise InsufficientTraces(f"Hankel matrix needs t_1..t_{2 * n - 2}, got {len(t)}")
    full = t.with_zero()
    h = np.array([[full[i + j] for j in range(n)] for i in range(n)])
    return HankelMatrix(n, h)


def _pivoted_cholesky(a: np.ndarray, tol: float):
    """Diagonally pivoted Cholesky of an equilibrated symmetric matrix.

    Returns ``(classification, pivots)``; ``a`` is overwritten.
    """
    pivots = []
    active = list(range(a.shape[0]))
    while active:
        sub = a[np.ix_(active, active)]
        j = int(np.argmax(np.diag(sub)))
        piv = sub[j, j]
        if piv <= tol:
            if np.max(np.abs(sub)) <= tol:
                return BOUNDARY, pivots
            return EXTERIOR, pivots
        pivots.append(piv)
        k = active.pop(j)
        if active:
            col = a[active, k]
            a[np.ix_(active, active)] -= np.outer(col, col) / piv
    return INTERIOR, pivots


def discriminant(t: TraceVector, tol: float = DEFAULT_TOL) -> DiscriminantValue:
    """Classify ``t`` against the discriminant domain and return ``ln|G(t)|``.

    Only ``t_1..t_N`` are used; they are extended to ``t_{2N-2}`` by the
    Newton recurrence, the Hankel matrix ``V V^T`` is equilibrated by its
    diagonal and factorized with diagonal pivoting.  A pivot no larger than
    ``tol`` (the equilibrated matrix has unit diagonal) stops the
    factorization: the point is on the boundary when the remaining Schur
    complement is within ``tol`` of zero and exterior otherwise.

    The whole chain runs in ``numpy.longdouble``; the Hankel matrix of power
    sums is badly conditioned for N of order 10, so double precision alone
    loses several digits of ``ln|G|``.
    """
    n = t.n_dim
    if len(t) < n:
        raise InsufficientTraces(f"need t_1..t_{n}, got {len(t)} traces")
    if n == 1:
        return DiscriminantValue(INTERIOR, 0.0, (1.0,))
    full = _extended_work(t.head(n), 2 * n - 2)
    h = np.array([[full[i + j] for j in range(n)] for i in range(n)], dtype=_WORK)
    diag = np.diag(h).copy()
    scale = np.max(np.abs(h))
    if np.any(diag < -tol * scale):
        return DiscriminantValue(EXTERIOR, -math.inf)
    d = np.where(diag > 0, np.sqrt(np.abs(diag)), _ONE)
    cls, pivots = _pivoted_cholesky(h / np.outer(d, d), tol)
    out_pivots = tuple(float(v) for v in pivots)
    if cls != INTERIOR:
        return DiscriminantValue(cls, -math.inf, out_pivots)
    logdet = np.sum(np.log(np.array(pivots, dtype=_WORK))) + 2 * np.sum(np.log(d))
    return DiscriminantValue(INTERIOR, float(logdet / 2), out_pivots)


def in_domain(t: TraceVector, tol: float = DEFAULT_TOL) -> bool:
    """Indicator of the discriminant domain (interior or boundary)."""
    return discriminant(t, tol).chi


def shift_traces(t: TraceVector, delta: float) -> TraceVector:
    """Traces of the spectrum shifted by ``delta`` (binomial re-expansion)."""
    full = [_WORK(v) for v in t.with_zero()]
    dl = _WORK(delta)
    out = []
    for k in range(1, len(t) + 1):
        acc = _ZERO
        for l in range(k + 1):
            acc += math.comb(k, l) * dl**l * full[k - l]
        out.append(float(acc))
    return TraceVector(t.n_dim, tuple(out))


def scale_traces(t: TraceVector, c: float) -> TraceVector:
    cl = _WORK(c)
    return TraceVector(t.n_dim, tuple(float(cl**k * _WORK(v)) for k, v in enumerate(t.values, start=1)))


def standardize_traces(t: TraceVector):
    """Shift and scale so that ``t_1 = 0`` and ``t_2 = 1``.

    Returns ``(delta, c, t_std)`` with ``delta = t_1/N`` and
    ``c = sqrt(t_2 - t_1**2/N)``; then
    ``ln|G(t)| = N(N-1)/2 ln c + ln|G(t_std)|``.
    """
    if len(t) < 2:
        raise InsufficientTraces("standardization needs t_1 and t_2")
    n = t.n_dim
    t1, t2 = _WORK(t.values[0]), _WORK(t.values[1])
    spread = float(t2 - t1 * t1 / n)
    # rounding in t1, t2 leaves a residue of order eps * t2 for {a, ..., a}
    if not spread > _DEGENERATE_SPREAD * abs(float(t2)):
        raise DegenerateScale(f"t2 - t1^2/N = {spread:g} leaves no scale to normalize")
    delta = t.values[0] / n
    c = math.sqrt(spread)
    return delta, c, scale_traces(shift_traces(t, -delta), 1.0 / c)


def log_vandermonde(s: Union[Spectrum, Sequence[float]]) -> float:
    """``sum_{mu<nu} ln|lambda_mu - lambda_nu|``; ``-inf`` for repeated eigenvalues."""
    vals = _as_spectrum_values(s)
    terms = []
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            gap = abs(vals[j] - vals[i])
            if gap == 0.0:
                return -math.inf
            terms.append(math.log(gap))
    return math.fsum(terms)


_CODES = {INTERIOR: 0, BOUNDARY: 1, EXTERIOR: 2}


def classify_batch(traces: np.ndarray, n_dim: int, tol: float = DEFAULT_TOL):
    """Vectorized :func:`discriminant` over rows of ``traces`` (shape ``(B, >=N)``).

    Returns ``(codes, log_abs_G)`` with codes 0 = interior, 1 = boundary,
    2 = exterior.  Rows whose unpivoted factorization meets a small pivot
    are redone one by one with the pivoted routine, so results match
    :func:`discriminant` on ill-conditioned rows too.
    """
    traces = np.asarray(traces, dtype=float)
    b = traces.shape[0]
    n = n_dim
    codes = np.zeros(b, dtype=int)
    logg = np.zeros(b)
    if n == 1 or b == 0:
        return codes, logg
    t = traces[:, :n].astype(_WORK)
    c = [np.ones(b, dtype=_WORK)]
    for k in range(1, n + 1):
        acc = np.zeros(b, dtype=_WORK)
        for i in range(1, k + 1):
            acc += c[k - i] * t[:, i - 1]
        c.append(-acc / k)
    full = [np.full(b, n, dtype=_WORK)] + [t[:, i] for i in range(n)]
    while len(full) <= 2 * n - 2:
        m = len(full)
        acc = np.zeros(b, dtype=_WORK)
        for k in range(1, n + 1):
            acc += c[k] * full[m - k]
        full.append(-acc)
    h = np.empty((b, n, n), dtype=_WORK)
    for i in range(n):
        for j in range(n):
            h[:, i, j] = full[i + j]
    diag = np.diagonal(h, axis1=1, axis2=2).copy()
    d = np.where(diag > 0, np.sqrt(np.abs(diag)), _ONE)
    a = h / (d[:, :, None] * d[:, None, :])
    logdet = 2 * np.sum(np.log(d), axis=1)
    suspect = np.zeros(b, dtype=bool)
    for k in range(n):
        piv = a[:, k, k]
        bad = ~(piv > tol)
        suspect |= ~(piv > _REFINE_PIVOT)
        piv = np.where(bad, _ONE, piv)
        logdet += np.where(bad, 0, np.log(piv))
        col = a[:, k + 1:, k]
        a[:, k + 1:, k + 1:] -= col[:, :, None] * col[:, None, :] / piv[:, None, None]
    logg[:] = (logdet / 2).astype(float)
    for row in np.flatnonzero(suspect):
        dv = discriminant(TraceVector(n, tuple(traces[row, :n])), tol)
        codes[row] = _CODES[dv.classification]
        logg[row] = dv.log_abs_G
    return codes, logg
