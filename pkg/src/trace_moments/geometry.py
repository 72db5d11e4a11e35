"""Checkable facts about the domain of trace vectors.

Cauchy-Schwarz inequalities between traces, the bounds on higher traces at
fixed ``t2``, the minimum of ``t2`` at fixed ``t1``, and the ingredients of
the Lagrange-multiplier description of extremal spectra: traces of a
root/multiplicity pattern, the multiplier solve and the stationarity
residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from .core import TraceVector
from .errors import SingularSystem

__all__ = [
    "BoundCheck",
    "BoundsReport",
    "ExtremalPattern",
    "cauchy_schwarz_check",
    "cauchy_schwarz_ok_batch",
    "t2_cut_bounds",
    "t2_cut_check",
    "min_t2_given_t1",
    "traces_from_pattern",
    "lagrange_residual",
    "solve_multipliers",
]

# relative slack for inequality and equality verdicts
REL_TOL = 1e-12


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    equality: bool = False


@dataclass(frozen=True)
class BoundsReport:
    checks: Tuple[BoundCheck, ...] = ()

    @property
    def all_satisfied(self) -> bool:
        return all(c.satisfied for c in self.checks)

    @property
    def violations(self) -> List[BoundCheck]:
        return [c for c in self.checks if not c.satisfied]

    def __add__(self, other: "BoundsReport") -> "BoundsReport":
        return BoundsReport(self.checks + other.checks)


def _le(name, lhs, rhs, tol=REL_TOL):
    slack = tol * max(abs(lhs), abs(rhs), 1e-300)
    return BoundCheck(name, lhs, rhs, lhs <= rhs + slack, abs(lhs - rhs) <= slack)


def cauchy_schwarz_check(t: TraceVector) -> BoundsReport:
    """``t_r^2 <= N t_2r`` and ``t_(p+q)^2 <= t_2p t_2q`` for every index available."""
    k = len(t)
    checks = []
    for r in range(1, k // 2 + 1):
        checks.append(_le(f"t{r}^2 <= N*t{2 * r}", t.t(r) ** 2, t.n_dim * t.t(2 * r)))
    for s in range(2, k // 2 + 1):
        for q in range(1, s // 2 + 1):
            p = s - q
            if p == q:
                continue
            checks.append(_le(f"t{s}^2 <= t{2 * p}*t{2 * q}", t.t(s) ** 2, t.t(2 * p) * t.t(2 * q)))
    return BoundsReport(tuple(checks))


def t2_cut_bounds(t2: float, n_dim: int, idx: int):
    """Range of ``t_idx`` over spectra with the given ``t2``.

    Odd ``idx = 2m+1``: ``|t_idx| <= t2^(m+1/2)``.  Even ``idx = 2m``:
    ``N^(1-m) t2^m <= t_idx <= t2^m``.
    """
    if idx < 3:
        raise ValueError("bounds are defined for idx >= 3")
    if not t2 > 0:
        raise ValueError("t2 must be positive")
    m, odd = divmod(idx, 2)
    if odd:
        b = t2 ** (m + 0.5)
        return -b, b
    return n_dim ** (1 - m) * t2**m, t2**m


def t2_cut_check(t: TraceVector) -> BoundsReport:
    """All ``t2``-cut bounds for the indices ``3..K`` present in ``t``."""
    if len(t) < 2 or not t.t(2) > 0:
        return BoundsReport((BoundCheck("t2 > 0", t.t(2) if len(t) > 1 else math.nan, 0.0, False),))
    checks = []
    t2 = t.t(2)
    for idx in range(3, len(t) + 1):
        lo, hi = t2_cut_bounds(t2, t.n_dim, idx)
        v = t.t(idx)
        if idx % 2:
            checks.append(_le(f"|t{idx}| <= t2^{idx / 2:g}", abs(v), hi))
        else:
            checks.append(_le(f"N^(1-{idx // 2})*t2^{idx // 2} <= t{idx}", lo, v))
            checks.append(_le(f"t{idx} <= t2^{idx // 2}", v, hi))
    return BoundsReport(tuple(checks))


def min_t2_given_t1(t1: float, n: int) -> float:
    """Smallest ``t2`` compatible with ``t1``, attained by the degenerate spectrum."""
    return t1 * t1 / n


@dataclass(frozen=True)
class ExtremalPattern:
    """Distinct roots ``r_1 < ... < r_k`` with multiplicities summing to N."""

    roots: tuple
    multiplicities: tuple

    def __post_init__(self):
        roots = tuple(float(r) for r in self.roots)
        mult = tuple(int(p) for p in self.multiplicities)
        if len(roots) != len(mult) or not roots:
            raise ValueError("roots and multiplicities must be non-empty and of equal length")
        if any(p < 1 for p in mult):
            raise ValueError("multiplicities must be positive")
        if any(b <= a for a, b in zip(roots, roots[1:])):
            raise ValueError("roots must be strictly increasing")
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "multiplicities", mult)

    @property
    def n_dim(self) -> int:
        return sum(self.multiplicities)

    def spectrum(self) -> list:
        return [r for r, p in zip(self.roots, self.multiplicities) for _ in range(p)]


def traces_from_pattern(pat: ExtremalPattern, l_max: int) -> TraceVector:
    vals = []
    for l in range(1, l_max + 1):
        vals.append(math.fsum(p * r**l for r, p in zip(pat.roots, pat.multiplicities)))
    return TraceVector(pat.n_dim, tuple(vals))


def _roots_of(pat) -> tuple:
    if isinstance(pat, ExtremalPattern):
        return pat.roots
    return tuple(float(r) for r in pat)


def lagrange_residual(pat: Union[ExtremalPattern, Sequence[float]],
                      multipliers: Sequence[float], k: int) -> float:
    """``max_j |(k+1) r_j^k - sum_i mu_i r_j^(i-1)|`` over the pattern roots."""
    if len(multipliers) != k:
        raise ValueError(f"expected {k} multipliers, got {len(multipliers)}")
    worst = 0.0
    for r in _roots_of(pat):
        poly = 0.0
        for mu in reversed(multipliers):
            poly = poly * r + mu
        worst = max(worst, abs((k + 1) * r**k - poly))
    return worst


def solve_multipliers(pat: Union[ExtremalPattern, Sequence[float]], k: int) -> list:
    """Multipliers making every root of the pattern a stationary point.

    The system ``(k+1) r_j^k = mu_1 + mu_2 r_j + ... + mu_k r_j^(k-1)`` is a
    Vandermonde system whose right-hand side is a pure power, so it is
    solved in closed form: ``(k+1) x^k - sum mu_i x^(i-1)`` must equal
    ``(k+1) prod_j (x - r_j)``.
    """
    roots = _roots_of(pat)
    if len(roots) != k:
        raise SingularSystem(f"need exactly k={k} distinct roots, got {len(roots)}")
    srt = sorted(roots)
    if any(b == a for a, b in zip(srt, srt[1:])):
        raise SingularSystem("roots are not distinct; the Vandermonde system is singular")
    # monic coefficients of prod (x - r_j), highest power first
    coef = [1.0]
    for r in roots:
        nxt = coef + [0.0]
        for i in range(1, len(nxt)):
            nxt[i] -= r * coef[i - 1]
        coef = nxt
    # coef[k - i] multiplies x^i
    return [-(k + 1) * coef[k - i] for i in range(k)]


def cauchy_schwarz_ok_batch(traces: np.ndarray, n_dim: int) -> np.ndarray:
    """Row-wise verdict of :func:`cauchy_schwarz_check` for a ``(B, K)`` array."""
    traces = np.asarray(traces, dtype=float)
    b, k = traces.shape
    full = np.hstack([np.full((b, 1), float(n_dim)), traces])
    ok = np.ones(b, dtype=bool)
    for s in range(1, k // 2 + 1):
        for q in range(0, s // 2 + 1):
            p = s - q
            if q and p == q:
                continue
            lhs = full[:, s] ** 2
            rhs = full[:, 2 * p] * full[:, 2 * q]
            slack = REL_TOL * np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
            ok &= lhs <= rhs + slack
    return ok
