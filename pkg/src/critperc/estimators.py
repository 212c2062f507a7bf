"""Monte Carlo estimates, coupled ratios and power-law fits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from . import _bfs
from .domains import Domain
from .explorer import (
    DEFAULT_BOX_FACTOR,
    Problem,
    SiteSet,
    anchored_problem,
    boundary_arm_problem,
    compile_problem,
    gasket_problem,
    multipoint_problem,
    one_arm_problem,
)
from .lattice import LatticeGeometry, nearest_site

Z95 = stats.norm.ppf(0.975)


class EstimationError(ValueError):
    pass


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n <= 0:
        raise EstimationError("empty sample")
    p = k / n
    denom = 1.0 + z * z / n
    mid = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if k == 0 else max(0.0, mid - half)
    hi = 1.0 if k == n else min(1.0, mid + half)
    return float(lo), float(hi)


@dataclass(frozen=True)
class Estimate:
    """Bernoulli frequency with Wald standard error and Wilson 95% interval."""

    successes: int
    n: int
    truncated: int = 0

    def __post_init__(self):
        if self.n < 1 or not 0 <= self.successes <= self.n:
            raise EstimationError(f"invalid counts {self.successes}/{self.n}")

    @property
    def p_hat(self) -> float:
        return self.successes / self.n

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1 - p) / self.n)

    @property
    def ci95(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.n)

    def z_score(self, p: float) -> float:
        se = math.sqrt(p * (1 - p) / self.n)
        return (self.p_hat - p) / se if se > 0 else (0.0 if self.p_hat == p else math.inf)

    @classmethod
    def from_samples(cls, event: np.ndarray, truncated: np.ndarray | None = None) -> "Estimate":
        event = np.asarray(event, dtype=bool)
        trunc = 0 if truncated is None else int(np.count_nonzero(truncated & ~event))
        return cls(int(np.count_nonzero(event)), int(event.size), trunc)


@dataclass(frozen=True)
class RatioEstimate:
    ratio: float
    stderr: float
    coupling: str
    counts: tuple[int, int, int, int] = (0, 0, 0, 0)

    def z_score(self, target: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.ratio == target else math.inf
        return (self.ratio - target) / self.stderr

    def within(self, target: float, rel: float = 0.0, nsigma: float = 3.0) -> bool:
        """``|ratio - target| <= max(nsigma * stderr, rel * target)``."""
        return abs(self.ratio - target) <= max(nsigma * self.stderr, rel * abs(target))


def joint_counts(num: np.ndarray, den: np.ndarray) -> tuple[int, int, int, int]:
    """``(n11, n10, n01, n00)`` for per-sample numerator/denominator outcomes."""
    num = np.asarray(num, dtype=bool)
    den = np.asarray(den, dtype=bool)
    n11 = int(np.count_nonzero(num & den))
    n10 = int(np.count_nonzero(num & ~den))
    n01 = int(np.count_nonzero(~num & den))
    return n11, n10, n01, num.size - n11 - n10 - n01


def ratio_from_counts(counts, coupling: str = "shared-samples") -> RatioEstimate:
    """Delta-method ratio ``P(num)/P(den)`` from a 2x2 joint table."""
    n11, n10, n01, n00 = counts
    n = n11 + n10 + n01 + n00
    ks_num, ks_den = n11 + n10, n11 + n01
    if ks_den == 0:
        raise EstimationError("denominator event never occurred; ratio undefined")
    a, b = ks_num / n, ks_den / n
    r = a / b
    cov = (n11 / n - a * b) if coupling == "shared-samples" else 0.0
    var = (a * (1 - a) + r * r * b * (1 - b) - 2 * r * cov) / (n * b * b)
    return RatioEstimate(r, math.sqrt(max(var, 0.0)), coupling, (n11, n10, n01, n00))


def independent_ratio(num: Estimate, den: Estimate) -> RatioEstimate:
    if den.successes == 0:
        raise EstimationError("denominator event never occurred; ratio undefined")
    a, b = num.p_hat, den.p_hat
    r = a / b
    var = a * (1 - a) / num.n / b ** 2 + r * r * b * (1 - b) / den.n / b ** 2
    return RatioEstimate(r, math.sqrt(var), "independent")


def bootstrap_ratio(counts, n_boot: int = 1000, seed: int = 0) -> tuple[float, float]:
    """Multinomial bootstrap of a joint table; returns ``(mean, stderr)`` of the ratio."""
    counts = np.asarray(counts, dtype=np.int64)
    n = int(counts.sum())
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(n, counts / n, size=n_boot)
    num = draws[:, 0] + draws[:, 1]
    den = draws[:, 0] + draws[:, 2]
    ok = den > 0
    r = num[ok] / den[ok]
    return float(r.mean()), float(r.std(ddof=1))


# power-law fits ------------------------------------------------------------

@dataclass(frozen=True)
class ExponentFit:
    slope: float
    stderr: float
    intercept: float
    r_squared: float
    points: tuple = ()

    def within(self, target: float, tol: float) -> bool:
        return abs(self.slope - target) <= tol


def fit_loglog(x, y, weights=None) -> ExponentFit:
    """Weighted least squares of ``log y`` on ``log x``.

    ``weights`` are inverse variances of ``log y``; the slope error uses them
    as absolute (not rescaled by the residuals).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 3:
        raise EstimationError("need at least three points for a power-law fit")
    if np.any(x <= 0) or np.any(y <= 0):
        raise EstimationError("power-law fits need positive abscissae and estimates")
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)
    lx, ly = np.log(x), np.log(y)
    sw = w.sum()
    mx, my = (w * lx).sum() / sw, (w * ly).sum() / sw
    sxx = (w * (lx - mx) ** 2).sum()
    slope = (w * (lx - mx) * (ly - my)).sum() / sxx
    intercept = my - slope * mx
    resid = ly - intercept - slope * lx
    sst = (w * (ly - my) ** 2).sum()
    r2 = 1.0 - (w * resid ** 2).sum() / sst if sst > 0 else 1.0
    if weights is None:
        dof = max(x.size - 2, 1)
        stderr = math.sqrt((resid ** 2).sum() / dof / sxx)
    else:
        stderr = math.sqrt(1.0 / sxx)
    pts = tuple(zip(lx.tolist(), ly.tolist(), w.tolist()))
    return ExponentFit(float(slope), float(stderr), float(intercept), float(r2), pts)


def fit_power_law(points: Sequence) -> ExponentFit:
    """Fit ``p ~ C x^slope`` to ``(x, Estimate)`` pairs (or ``(x, y)`` / ``(x, y, w)``)."""
    xs, ys, ws = [], [], []
    for pt in points:
        x, y = pt[0], pt[1]
        if isinstance(y, Estimate):
            if y.successes == 0:
                raise EstimationError(f"zero estimate at x={x}")
            p = y.p_hat
            var = max((1 - p) / (y.n * p), 1.0 / (y.n * y.n))
            xs.append(x), ys.append(p), ws.append(1.0 / var)
        else:
            xs.append(x), ys.append(y), ws.append(pt[2] if len(pt) > 2 else 1.0)
    weighted = any(isinstance(pt[1], Estimate) or len(pt) > 2 for pt in points)
    return fit_loglog(xs, ys, ws if weighted else None)


# event specs ---------------------------------------------------------------

KINDS = ("site", "one_arm", "boundary_arm", "anchored", "multipoint", "gasket", "images")


@dataclass(frozen=True)
class EventSpec:
    """Declarative description of one connection event at a fixed mesh."""

    kind: str
    mesh: float = 1.0
    z: complex | None = None
    eps: float | None = None
    bulk: tuple = ()
    boundary: tuple = ()
    domain: Domain | None = None
    box_factor: float = DEFAULT_BOX_FACTOR
    patch: frozenset | None = None
    component: str = "both"
    forced: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    @property
    def geometry(self) -> LatticeGeometry:
        return LatticeGeometry(self.mesh)

    def describe(self) -> dict:
        d = {"kind": self.kind, "mesh": self.mesh}
        if self.z is not None:
            d["z"] = [self.z.real, self.z.imag]
        if self.eps is not None:
            d["eps"] = self.eps
        if self.bulk:
            d["bulk"] = [[z.real, z.imag] for z in self.bulk]
        if self.boundary:
            d["boundary"] = list(self.boundary)
        if self.domain is not None:
            d["domain"] = self.domain.spec()
        if self.kind in ("anchored", "multipoint", "images"):
            d["box_factor"] = self.box_factor
        if self.patch is not None:
            d["patch"] = sorted(list(c) for c in self.patch)
        return d


def restrict(problem: Problem, sites) -> Problem:
    """Close every site of ``problem`` outside ``sites``."""
    keep = SiteSet(frozenset(sites))
    W, H = problem.mask.shape
    ii, jj = np.meshgrid(np.arange(W) + problem.oi, np.arange(H) + problem.oj, indexing="ij")
    problem.mask[~keep.contains_sites(ii, jj, 1.0)] = 0
    return problem


def build_problems(spec: EventSpec) -> list[Problem]:
    g = spec.geometry
    z = spec.z
    f = spec.forced
    if spec.kind == "site":
        c = nearest_site(z if z is not None else 0j, g)
        probs = [compile_problem([c], g, region=SiteSet(frozenset([c])), forced=f)]
    elif spec.kind == "one_arm":
        probs = [one_arm_problem(z if z is not None else 0j, spec.eps, g, f)]
    elif spec.kind == "boundary_arm":
        probs = [boundary_arm_problem(spec.eps, g, f)]
    elif spec.kind == "anchored":
        probs = [anchored_problem([z], g, spec.box_factor, f)]
    elif spec.kind == "multipoint":
        probs = [multipoint_problem(spec.bulk, spec.boundary, g, spec.box_factor, f)]
    elif spec.kind == "gasket":
        probs = [gasket_problem(z, spec.domain, g, spec.box_factor, f)]
    else:
        p = anchored_problem([z], g, spec.box_factor, f)
        probs = [p, p.reflected()]
    if spec.patch is not None:
        probs = [restrict(p, spec.patch) for p in probs]
    return probs


@dataclass
class EventSamples:
    """Per-sample outcomes of one event over a sample range."""

    event: np.ndarray
    truncated: np.ndarray
    parts: dict = field(default_factory=dict)


def _outcome(kind: str, problem: Problem, out) -> np.ndarray:
    escaped, trunc, hits, maxd4, visited = out
    if kind in ("one_arm", "boundary_arm", "gasket"):
        return escaped
    if kind == "site":
        return maxd4 >= 0
    if kind == "multipoint":
        return (maxd4 >= 0) & hits.all(axis=1)
    return hits.all(axis=1)


def evaluate(spec: EventSpec, seed: int, n: int, start: int = 0, workers: int | None = None) -> EventSamples:
    probs = build_problems(spec)
    outs = [_bfs.run_batch(p, seed, n, start, workers) for p in probs]
    if spec.kind == "images":
        upper = _outcome("anchored", probs[0], outs[0])
        lower = _outcome("anchored", probs[1], outs[1])
        both = upper & lower
        trunc = outs[0][1] | outs[1][1]
        event = {"both": both, "upper": upper, "lower": lower}[spec.component]
        return EventSamples(event, trunc, {"upper": upper, "lower": lower, "both": both})
    event = _outcome(spec.kind, probs[0], outs[0])
    return EventSamples(event, outs[0][1])


def mc_probability(spec: EventSpec, n: int, seed: int, workers: int | None = None) -> Estimate:
    """Frequency of ``spec`` over sample keys ``(seed, 0..n-1)``."""
    if n < 1:
        raise EstimationError("n must be at least 1")
    s = evaluate(spec, seed, n, workers=workers)
    return Estimate.from_samples(s.event, s.truncated)


def coupled_ratio(numerator: EventSpec, denominator: EventSpec, n: int, seed: int,
                  workers: int | None = None) -> RatioEstimate:
    """Ratio of two event probabilities evaluated on identical configurations."""
    a = evaluate(numerator, seed, n, workers=workers).event
    b = evaluate(denominator, seed, n, workers=workers).event
    return ratio_from_counts(joint_counts(a, b))
