"""Shared domain types: ensemble parameters, spectra, trace vectors, samples
and the seedable random stream used by every sampler."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidExponent, NonPositiveBeta, NonPositiveN

__all__ = [
    "EnsembleParams",
    "Spectrum",
    "TraceVector",
    "MatrixSample",
    "RngStream",
    "make_params",
    "exponent_p",
    "power_sum",
]

_UINT64 = 2**64


@dataclass(frozen=True)
class EnsembleParams:
    """Matrix size ``n_dim`` and Dyson index ``beta`` of a Gaussian beta-ensemble.

    Use :func:`make_params` to build a validated instance.
    """

    n_dim: int
    beta: float

    @property
    def p(self) -> float:
        return exponent_p(self)

    def require_exponent(self, offset: float = 1.0) -> float:
        """Return ``p`` after checking ``p + offset > 0``.

        ``offset`` is the shift at which a Gamma function of the exponent is
        evaluated (1 for the joint density, 3/2 for the ``t2`` marginal).
        """
        p = self.p
        if not p + offset > 0:
            raise InvalidExponent(
                f"exponent p={p:g} for N={self.n_dim}, beta={self.beta:g} "
                f"requires p + {offset:g} > 0"
            )
        return p


def make_params(n: int, beta: float) -> EnsembleParams:
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise NonPositiveN(f"matrix size must be a positive integer, got {n!r}")
    beta = float(beta)
    if not (beta > 0 and math.isfinite(beta)):
        raise NonPositiveBeta(f"beta must be a finite positive real, got {beta!r}")
    return EnsembleParams(int(n), beta)


def exponent_p(params: EnsembleParams) -> float:
    """Exponent of ``(t2 - t1**2/N)`` in the joint density of the first two traces."""
    n, b = params.n_dim, params.beta
    return (b * n * n + (2.0 - b) * n - 6.0) / 4.0


def power_sum(values: Sequence[float], r: int) -> float:
    """``sum(v**r)``, compensated.

    Powers are formed in extended precision and split into a double head and
    tail before exact accumulation with ``math.fsum``, so odd power sums
    that nearly cancel keep their leading digits.
    """
    terms = []
    for v in values:
        pw = np.longdouble(v) ** r
        hi = float(pw)
        terms.append(hi)
        terms.append(float(pw - hi))
    return math.fsum(terms)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues stored in non-decreasing order."""

    values: tuple

    def __post_init__(self):
        vals = tuple(sorted(float(v) for v in self.values))
        if not vals:
            raise NonPositiveN("a spectrum needs at least one eigenvalue")
        object.__setattr__(self, "values", vals)

    @property
    def n_dim(self) -> int:
        return len(self.values)

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values)


@dataclass(frozen=True)
class TraceVector:
    """Power sums ``t_1 .. t_K`` of an ``n_dim``-point spectrum.

    ``t_0 = n_dim`` is implied and never stored; :meth:`t` returns it for
    ``r = 0`` so that formulas can index the full sequence directly.
    """

    n_dim: int
    values: tuple

    def __post_init__(self):
        if int(self.n_dim) != self.n_dim or self.n_dim < 1:
            raise NonPositiveN(f"n_dim must be a positive integer, got {self.n_dim!r}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("a trace vector needs at least t_1")
        object.__setattr__(self, "n_dim", int(self.n_dim))
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def t(self, r: int) -> float:
        if r == 0:
            return float(self.n_dim)
        return self.values[r - 1]

    def with_zero(self) -> list:
        """``[t_0, t_1, ..., t_K]`` as a plain list."""
        return [float(self.n_dim), *self.values]

    def head(self, k: int) -> "TraceVector":
        return TraceVector(self.n_dim, self.values[:k])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values)


DENSE_REAL = "dense-real-symmetric"
DENSE_COMPLEX = "dense-complex-hermitian"
TRIDIAGONAL = "tridiagonal"


@dataclass(frozen=True)
class MatrixSample:
    """One ensemble draw.

    Dense kinds carry the full self-adjoint ``matrix``; the tridiagonal kind
    carries ``diag`` (length N) and ``offdiag`` (length N-1, strictly positive).
    """

    kind: str
    matrix: Optional[np.ndarray] = None
    diag: Optional[np.ndarray] = None
    offdiag: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind in (DENSE_REAL, DENSE_COMPLEX):
            if self.matrix is None:
                raise ValueError("dense sample needs a matrix payload")
        elif self.kind == TRIDIAGONAL:
            if self.diag is None or self.offdiag is None:
                raise ValueError("tridiagonal sample needs diag and offdiag")
            if len(self.offdiag) != len(self.diag) - 1:
                raise ValueError("offdiag must have length N-1")
            if np.any(np.asarray(self.offdiag) <= 0):
                raise ValueError("tridiagonal off-diagonal entries must be positive")
        else:
            raise ValueError(f"unknown sample kind {self.kind!r}")

    @property
    def n_dim(self) -> int:
        if self.matrix is not None:
            return self.matrix.shape[0]
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    Streams with equal keys replay identical draws; distinct ``stream_id``
    values are spawned children of one :class:`numpy.random.SeedSequence`
    and are statistically independent.  Each worker should own its stream.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        for name, v in (("seed", seed), ("stream_id", stream_id)):
            if int(v) != v or not 0 <= v < _UINT64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def normal(self, scale=1.0, size=None):
        return self.generator.normal(0.0, scale, size)

    def standard_gamma(self, shape, size=None):
        return self.generator.standard_gamma(shape, size)

    def uniform(self, size=None):
        return self.generator.random(size)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)
