"""Statistical oracles: KS statistics, CDFs, nested quadrature, histograms
and the campaign runner comparing samplers with the closed-form laws."""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from . import algebra, distributions, geometry, sampling
from .core import EnsembleParams, RngStream
from .errors import EmptySample, NoConvergence
from .special import gammainc_lower, gammainc_lower_array

__all__ = [
    "VerificationReport",
    "Histogram",
    "Region",
    "histogram",
    "ks_statistic",
    "ks_2samp_statistic",
    "ks_threshold",
    "ks_2samp_threshold",
    "cdf_t1",
    "cdf_t2",
    "default_region",
    "quadrature_2d",
    "SAMPLERS",
    "STREAM_IDS",
    "draw_traces",
    "run_campaign",
    "reports_to_json",
    "reports_to_csv",
]

# asymptotic 1% critical value of the Kolmogorov distribution
KS_C01 = 1.63
Z_THRESHOLD = 4.0
MOMENT_ORDERS = tuple((k, n) for k in range(3) for n in range(3))

SAMPLERS = ("dense", "tridiagonal", "mcmc", "exact")
STREAM_IDS = {"dense": 1, "tridiagonal": 2, "mcmc": 3, "exact": 4}


@dataclass
class VerificationReport:
    name: str
    statistic: float
    threshold: float
    n_samples: int
    passed: bool
    details: Dict[str, object] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "n_samples": self.n_samples,
            "passed": self.passed,
            "details": self.details,
        }


@dataclass(frozen=True)
class Histogram:
    edges: tuple
    counts: tuple
    total: int

    def __post_init__(self):
        if sum(self.counts) != self.total:
            raise ValueError("counts must add up to total")
        if any(b <= a for a, b in zip(self.edges, self.edges[1:])):
            raise ValueError("edges must be strictly increasing")
        if len(self.edges) != len(self.counts) + 1:
            raise ValueError("need one more edge than bins")

    @property
    def centers(self) -> np.ndarray:
        e = np.asarray(self.edges)
        return 0.5 * (e[1:] + e[:-1])

    def density(self) -> np.ndarray:
        """Counts scaled to unit area."""
        widths = np.diff(self.edges)
        return np.asarray(self.counts) / (max(self.total, 1) * widths)

    def merge(self, other: "Histogram") -> "Histogram":
        if self.edges != other.edges:
            raise ValueError("cannot merge histograms with different edges")
        counts = tuple(a + b for a, b in zip(self.counts, other.counts))
        return Histogram(self.edges, counts, self.total + other.total)


def histogram(samples, bins: int = 50, range: Optional[Tuple[float, float]] = None) -> Histogram:
    """Histogram of ``samples``; values outside ``range`` are dropped."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise EmptySample("cannot histogram an empty sample")
    counts, edges = np.histogram(x, bins=bins, range=range)
    return Histogram(tuple(edges.tolist()), tuple(int(c) for c in counts), int(counts.sum()))


def _apply_cdf(cdf, x):
    try:
        out = np.asarray(cdf(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([cdf(float(v)) for v in x])


def ks_statistic(samples, cdf: Callable) -> float:
    """One-sample Kolmogorov-Smirnov distance ``sup |F_n - F|``.

    ``samples`` need not be pre-sorted; ``cdf`` may be scalar or vectorized.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise EmptySample("KS statistic needs at least one sample")
    f = _apply_cdf(cdf, x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_2samp_statistic(a, b) -> float:
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptySample("two-sample KS needs non-empty samples")
    allx = np.concatenate([a, b])
    fa = np.searchsorted(a, allx, side="right") / a.size
    fb = np.searchsorted(b, allx, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_threshold(n: int) -> float:
    return KS_C01 / math.sqrt(n)


def ks_2samp_threshold(n: int, m: int) -> float:
    return KS_C01 * math.sqrt((n + m) / (n * m))


def cdf_t1(params: EnsembleParams, t1):
    """Normal(0, N/beta) CDF, vectorized."""
    from scipy.special import ndtr

    return ndtr(np.asarray(t1, dtype=float) / math.sqrt(params.n_dim / params.beta))


def cdf_t2(params: EnsembleParams, t2):
    """``P(p + 3/2, beta t2 / 2)``; 0 for ``t2 <= 0``.  Scalar in, scalar out."""
    p = params.require_exponent(1.5)
    if np.ndim(t2) == 0:
        return gammainc_lower(p + 1.5, 0.5 * params.beta * float(t2))
    return gammainc_lower_array(p + 1.5, 0.5 * params.beta * np.asarray(t2, dtype=float))


# ---------------------------------------------------------------- quadrature


@dataclass(frozen=True)
class Region:
    """Truncated integration box in ``(v, u) = (t1, t2 - t1^2/N)``."""

    v_max: float
    u_max: float


def default_region(params: EnsembleParams, extra_power: float = 0.0) -> Region:
    """Box whose Gaussian and Gamma tails are far below 1e-10 of the mass.

    ``extra_power`` widens the box for integrands carrying polynomial
    weights (moment integrals).
    """
    n, beta = params.n_dim, params.beta
    shape = max(params.p + 1.0, 0.0) + extra_power
    v_max = (10.0 + extra_power) * math.sqrt(n / beta)
    u_max = (2.0 / beta) * (shape + 14.0 * math.sqrt(shape + 1.0) + 60.0)
    return Region(v_max, u_max)


def quadrature_2d(params: EnsembleParams, integrand: Callable[[float, float], float],
                  region: Optional[Region] = None, rel_tol: float = 1e-9,
                  limit: int = 200) -> Tuple[float, float]:
    """Integrate ``integrand(t1, t2)`` over ``t2 > t1^2/N``.

    The inner integral runs over ``u = t2 - t1^2/N`` from 0 (so the lower
    limit is fixed and an endpoint singularity sits at ``u = 0``), the outer
    over ``t1``; both use adaptive Gauss-Kronrod (QUADPACK).  The error
    estimate is the outer estimate plus the outer width times the worst
    inner estimate.  Raises :class:`NoConvergence` when that exceeds
    ``rel_tol`` times the value.
    """
    region = region or default_region(params)
    n = params.n_dim
    inner_tol = rel_tol * 1e-2
    worst_inner = [0.0]

    def inner(v):
        vv = v * v / n
        val, err = integrate.quad(lambda u: integrand(v, u + vv), 0.0, region.u_max,
                                  epsabs=0.0, epsrel=inner_tol, limit=limit)
        worst_inner[0] = max(worst_inner[0], err)
        return val

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, outer_err = integrate.quad(inner, -region.v_max, region.v_max, points=[0.0],
                                              epsabs=0.0, epsrel=rel_tol, limit=limit)
        except integrate.IntegrationWarning as exc:
            raise NoConvergence(str(exc).strip().splitlines()[0]) from exc
    err_est = outer_err + 2.0 * region.v_max * worst_inner[0]
    if err_est > rel_tol * abs(value):
        raise NoConvergence(f"error estimate {err_est:.3g} exceeds {rel_tol:g} x {value:.6g}")
    return value, err_est


# ----------------------------------------------------------------- campaigns


def _mcmc_layout(n_samples):
    n_chains = max(1, min(1000, n_samples // 100))
    per_chain = -(-n_samples // n_chains)
    return n_chains, per_chain


def draw_traces(params: EnsembleParams, sampler: str, n_samples: int, seed: int,
                r_max: int = 2) -> np.ndarray:
    """Draw ``n_samples`` trace vectors ``(t_1..t_r_max)`` from one sampler.

    The exact sampler only produces ``(t1, t2)``; its result always has two
    columns.  Each sampler reads its own stream ``(seed, STREAM_IDS[sampler])``.
    """
    if sampler not in STREAM_IDS:
        raise ValueError(f"unknown sampler {sampler!r}; choose from {', '.join(SAMPLERS)}")
    rng = RngStream(seed, STREAM_IDS[sampler])
    if sampler == "dense":
        mats = sampling.sample_dense_batch(params, rng, n_samples)
        return algebra.traces_of_dense_batch(mats, r_max)
    if sampler == "tridiagonal":
        diag, off = sampling.sample_tridiagonal_batch(params, rng, n_samples)
        return algebra.traces_of_tridiagonal_batch(diag, off, r_max)
    if sampler == "mcmc":
        n_chains, per_chain = _mcmc_layout(n_samples)
        cfg = sampling.default_mcmc_config(params, per_chain)
        spectra, _ = sampling.mcmc_chains(params, cfg, rng, n_chains)
        lam = spectra.reshape(-1, params.n_dim)[:n_samples]
        return np.stack([np.sum(lam**r, axis=1) for r in range(1, r_max + 1)], axis=1)
    t1, t2 = distributions.sample_t1_t2_exact(params, rng, n_samples)
    return np.stack([t1, t2], axis=1)


def _moment_report(prefix, params, t1, t2, k, n_pow, details):
    """z-score of the sample mean of ``t1^2k t2^n`` with its empirical standard error."""
    m = distributions.mixed_moment(params, k, n_pow)
    mono = t1 ** (2 * k) * t2**n_pow
    mean = float(np.mean(mono))
    se = float(np.std(mono, ddof=1)) / math.sqrt(mono.size)
    if se == 0.0:
        z = 0.0 if math.isclose(mean, m, rel_tol=1e-12) else math.inf
    else:
        z = (mean - m) / se
    det = dict(details, expected=m, empirical=mean, std_error=se)
    return VerificationReport(f"{prefix}:moment_k{k}_n{n_pow}", float(z), Z_THRESHOLD,
                              int(mono.size), abs(z) <= Z_THRESHOLD, det)


def _domain_report(prefix, params, traces, details):
    n = params.n_dim
    t1, t2 = traces[:, 0], traces[:, 1]
    failures = int(np.count_nonzero(t2 < t1 * t1 / n * (1 - 1e-12)))
    if traces.shape[1] >= n:
        ok = geometry.cauchy_schwarz_ok_batch(traces, n)
        codes, _ = algebra.classify_batch(traces, n)
        failures = int(np.count_nonzero(~ok | (codes == 2)))
    return VerificationReport(f"{prefix}:domain", float(failures), 0.0, int(traces.shape[0]),
                              failures == 0, dict(details))


def run_campaign(params: EnsembleParams, n_samples: int, seed: int,
                 sampler_set: Iterable[str] = SAMPLERS, threads: int = 1) -> List[VerificationReport]:
    """Compare every requested sampler with the closed forms and with each other.

    Per sampler: KS of ``t1`` and ``t2`` against their CDFs, z-scores of
    ``E[t1^2k t2^n]`` for ``k, n`` in ``{0, 1, 2}``, and a domain check of
    every drawn trace vector.  Then two-sample KS for each pair of samplers.
    Results depend only on the arguments, not on ``threads``.
    """
    if n_samples < 1000:
        raise ValueError("a campaign needs at least 1000 samples per sampler")
    params.require_exponent(1.0)
    requested = set(sampler_set)
    unknown = requested - set(SAMPLERS)
    if unknown:
        raise ValueError(f"unknown samplers: {sorted(unknown)}")
    samplers = [s for s in SAMPLERS if s in requested]
    r_max = max(2, 2 * params.n_dim)

    def job(name):
        return draw_traces(params, name, n_samples, seed, r_max)

    if threads > 1 and len(samplers) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            drawn = dict(zip(samplers, pool.map(job, samplers)))
    else:
        drawn = {s: job(s) for s in samplers}

    base = {"seed": seed, "n": params.n_dim, "beta": params.beta}
    reports = []
    for name in samplers:
        tr = drawn[name]
        t1, t2 = tr[:, 0], tr[:, 1]
        det = dict(base, sampler=name, stream_id=STREAM_IDS[name])
        d1 = ks_statistic(t1, lambda x: cdf_t1(params, x))
        thr = ks_threshold(t1.size)
        reports.append(VerificationReport(f"{name}:ks_t1", d1, thr, t1.size, d1 <= thr, dict(det)))
        d2 = ks_statistic(t2, lambda x: cdf_t2(params, x))
        reports.append(VerificationReport(f"{name}:ks_t2", d2, thr, t2.size, d2 <= thr, dict(det)))
        for k, n_pow in MOMENT_ORDERS:
            reports.append(_moment_report(name, params, t1, t2, k, n_pow, det))
        reports.append(_domain_report(name, params, tr, det))
    for i, a in enumerate(samplers):
        for b in samplers[i + 1:]:
            for col, label in ((0, "t1"), (1, "t2")):
                x, y = drawn[a][:, col], drawn[b][:, col]
                d = ks_2samp_statistic(x, y)
                thr = ks_2samp_threshold(x.size, y.size)
                reports.append(VerificationReport(f"ks2_{label}:{a}-vs-{b}", d, thr, x.size,
                                                  d <= thr, dict(base, samplers=f"{a},{b}")))
    return reports


def reports_to_json(reports: Sequence[VerificationReport]) -> str:
    return json.dumps([r.as_dict() for r in reports], indent=2, sort_keys=True)


CSV_COLUMNS = ("name", "statistic", "threshold", "passed", "seed", "n", "beta", "n_samples")


def reports_to_csv(reports: Sequence[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([
            r.name, repr(float(r.statistic)), repr(float(r.threshold)), str(r.passed).lower(),
            r.details.get("seed", ""), r.details.get("n", ""), repr(float(r.details.get("beta", math.nan))),
            r.n_samples,
        ])
    return buf.getvalue()
