"""Formula-verification experiments.

Each experiment evaluates all of its events on one shared set of sample
keys, so unknown constants and normalizations cancel in same-mesh ratios.
Results expose ``rows()`` (CSV-ready dicts) and ``checks(thresholds)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _bfs
from .domains import Disk, Domain
from .estimators import (
    Estimate,
    ExponentFit,
    RatioEstimate,
    fit_power_law,
    joint_counts,
    ratio_from_counts,
)
from .explorer import (
    DEFAULT_BOX_FACTOR,
    anchored_problem,
    boundary_arm_problem,
    gasket_problem,
    gasket_sweep_problem,
    multipoint_problem,
    one_arm_problem,
)
from .lattice import LatticeGeometry, as_point

BULK_EXPONENT = 5 / 48
BOUNDARY_EXPONENT = 1 / 3
ANCHOR_ANGLE_EXPONENT = 11 / 48
ANCHOR_RADIAL_EXPONENT = 7 / 16

DEFAULT_THRESHOLDS = {
    "bulk_slope_tol": 0.02,
    "boundary_slope_tol": 0.03,
    "anchored_rel_tol": 0.05,
    "gasket_rel_tol": 0.05,
    "multipoint_rel_tol": 0.10,
    "nsigma": 3.0,
    "mesh_stability_rel": 0.10,
    "box_stability_sigma": 1.0,
}


@dataclass(frozen=True)
class Check:
    name: str
    observed: float
    target: float
    tolerance: float
    z: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name}: observed {self.observed:.6g} target {self.target:.6g} "
                f"tol {self.tolerance:.3g} z {self.z:+.2f}")


def ratio_check(name: str, r: RatioEstimate, target: float, rel: float, nsigma: float) -> Check:
    tol = max(nsigma * r.stderr, rel * abs(target))
    return Check(name, r.ratio, target, tol, r.z_score(target), abs(r.ratio - target) <= tol)


def _row(experiment: str, label: str, **kw) -> dict:
    row = {"experiment": experiment, "label": label}
    est = kw.pop("estimate", None)
    if est is not None:
        lo, hi = est.ci95
        row.update(n=est.n, successes=est.successes, p_hat=est.p_hat, stderr=est.stderr,
                   ci_low=lo, ci_high=hi, truncated=est.truncated)
    ratio = kw.pop("ratio", None)
    if ratio is not None:
        row.update(ratio=ratio.ratio, ratio_stderr=ratio.stderr)
    row.update(kw)
    return row


def eps_threshold4(eps: float, mesh: float) -> float:
    """Smallest ``4 d^2`` (lattice units) counted as distance ``>= eps``."""
    return 4.0 * (eps / mesh) ** 2 * (1.0 - 1e-12)


# arm sweeps --------------------------------------------------------------

@dataclass
class ArmSweep:
    kind: str
    mesh: float
    eps: tuple
    estimates: list
    fit: ExponentFit
    events: np.ndarray = field(repr=False)
    normalizer: Estimate | None = None
    ratios: list | None = None

    @property
    def target(self) -> float:
        return -(BULK_EXPONENT if self.kind == "one_arm" else BOUNDARY_EXPONENT)

    def rows(self) -> list[dict]:
        name = "one-arm" if self.kind == "one_arm" else "boundary-arm"
        out = []
        for k, (e, est) in enumerate(zip(self.eps, self.estimates)):
            extra = {}
            if self.ratios is not None:
                extra["ratio"] = self.ratios[k]
                extra["target"] = e ** self.target
            out.append(_row(name, f"eps={e:g}", eps=e, mesh=self.mesh, estimate=est, **extra))
        out.append({"experiment": name, "label": "slope", "mesh": self.mesh, "ratio": self.fit.slope,
                    "ratio_stderr": self.fit.stderr, "target": self.target})
        return out

    def checks(self, th=DEFAULT_THRESHOLDS) -> list[Check]:
        tol = th["bulk_slope_tol"] if self.kind == "one_arm" else th["boundary_slope_tol"]
        z = (self.fit.slope - self.target) / self.fit.stderr if self.fit.stderr > 0 else 0.0
        name = "bulk one-arm slope" if self.kind == "one_arm" else "boundary one-arm slope"
        return [Check(name, self.fit.slope, self.target, tol, z, self.fit.within(self.target, tol))]


def arm_sweep(kind: str, eps: Sequence[float], mesh: float, n: int, seed: int, z=0j,
              normalize: bool = False, workers: int | None = None) -> ArmSweep:
    """Estimate ``P(arm to distance eps)`` for every ``eps`` from one exploration per sample.

    The exploration runs to the largest radius; the smaller radii are read off
    the farthest site reached.  With ``normalize`` the radius-1 event (the
    normalization ``pi_a``) is included and coupled ratios are reported.
    """
    eps = tuple(sorted(float(e) for e in eps))
    g = LatticeGeometry(mesh)
    rmax = max(eps + ((1.0,) if normalize else ()))
    if kind == "one_arm":
        problem = one_arm_problem(z, rmax, g)
    elif kind == "boundary_arm":
        problem = boundary_arm_problem(rmax, g)
    else:
        raise ValueError(f"unknown arm kind {kind!r}")
    escaped, _, _, maxd4, _ = _bfs.run_batch(problem, seed, n, workers=workers)

    def event(e):
        return escaped | (maxd4 >= eps_threshold4(e, mesh))

    events = np.stack([event(e) for e in eps])
    estimates = [Estimate.from_samples(ev) for ev in events]
    fit = fit_power_law(list(zip(eps, estimates)))
    normalizer = ratios = None
    if normalize:
        ref = event(1.0)
        normalizer = Estimate.from_samples(ref)
        ratios = [ratio_from_counts(joint_counts(ev, ref)) for ev in events]
    return ArmSweep(kind, mesh, eps, estimates, fit, events, normalizer, ratios)


# anchored profile ------------------------------------------------------

def anchored_target_ratio(z1, z2) -> float:
    """``rho_H(z1) / rho_H(z2)`` for ``rho_H(z) ~ y^(11/48) |z|^(-2/3)``."""
    z1, z2 = as_point(z1), as_point(z2)
    return (z1.imag / z2.imag) ** ANCHOR_ANGLE_EXPONENT * (abs(z2) / abs(z1)) ** (2 / 3)


@dataclass
class AnchoredProfile:
    mesh: float
    points: tuple
    hits: np.ndarray = field(repr=False)
    truncated: np.ndarray = field(repr=False)
    columns: dict = field(repr=False, default_factory=dict)

    def event(self, z) -> np.ndarray:
        return self.hits[:, self.columns[as_point(z)]]

    def estimate(self, z) -> Estimate:
        return Estimate.from_samples(self.event(z), self.truncated)

    def ratio(self, z1, z2) -> RatioEstimate:
        return ratio_from_counts(joint_counts(self.event(z1), self.event(z2)))

    def rows(self) -> list[dict]:
        out = []
        for z in self.points:
            ref = 1j * abs(z)
            out.append(_row("anchored", f"z={z.real:g}{z.imag:+g}i", x=z.real, y=z.imag, mesh=self.mesh,
                            estimate=self.estimate(z), ratio=self.ratio(z, ref),
                            target=anchored_target_ratio(z, ref)))
        return out

    def checks(self, th=DEFAULT_THRESHOLDS, pairs=None) -> list[Check]:
        pairs = pairs if pairs is not None else default_anchored_pairs(self.points)
        return [ratio_check(f"anchored rho({_fmt(a)})/rho({_fmt(b)})", self.ratio(a, b),
                            anchored_target_ratio(a, b), th["anchored_rel_tol"], th["nsigma"])
                for a, b in pairs]


def default_anchored_pairs(points):
    pairs = []
    for z in points:
        ref = 1j * abs(z)
        if not np.isclose(z, ref):
            pairs.append((ref, z))
    imag = sorted({z for z in points if np.isclose(z.real, 0)}, key=lambda z: z.imag)
    pairs += list(zip(imag[:-1], imag[1:]))
    return pairs


def _fmt(z) -> str:
    z = as_point(z)
    return f"{z.real:.4g}{z.imag:+.4g}i"


def anchored_profile(points: Sequence, mesh: float, n: int, seed: int,
                     box_factor: float = DEFAULT_BOX_FACTOR, workers: int | None = None) -> AnchoredProfile:
    """``P(z^a -- 0 in the half-plane)`` at every point, from one exploration of the origin's cluster."""
    points = tuple(dict.fromkeys(as_point(z) for z in points))
    allpts = tuple(dict.fromkeys(points + tuple(1j * abs(z) for z in points)))
    g = LatticeGeometry(mesh)
    problem = anchored_problem(allpts, g, box_factor)
    _, trunc, hits, _, _ = _bfs.run_batch(problem, seed, n, workers=workers)
    from .lattice import Half, nearest_site

    col_of_site = {s: k for k, s in enumerate(problem.target_sites)}
    columns = {z: col_of_site[nearest_site(z, g, Half.UPPER)] for z in allpts}
    return AnchoredProfile(mesh, points, hits, trunc, columns)


@dataclass
class BoxStability:
    points: tuple
    small: AnchoredProfile
    large: AnchoredProfile

    def checks(self, th=DEFAULT_THRESHOLDS) -> list[Check]:
        out = []
        for z in self.points:
            a = self.small.estimate(z)
            b = self.large.estimate(z)
            change = b.p_hat - a.p_hat
            sig = a.stderr
            tol = th["box_stability_sigma"] * sig
            out.append(Check(f"box doubling at {_fmt(z)}", change, 0.0, tol,
                             change / sig if sig > 0 else 0.0, abs(change) < tol))
        return out

    def rows(self) -> list[dict]:
        out = []
        for z in self.points:
            for tag, prof in (("box", self.small), ("box2", self.large)):
                out.append(_row("box-stability", f"{tag} z={_fmt(z)}", x=z.real, y=z.imag, mesh=prof.mesh,
                                estimate=prof.estimate(z)))
        return out


def box_stability(points, mesh, n, seed, box_factor=DEFAULT_BOX_FACTOR, workers=None) -> BoxStability:
    points = tuple(as_point(z) for z in points)
    small = anchored_profile(points, mesh, n, seed, box_factor, workers)
    large = anchored_profile(points, mesh, n, seed, 2 * box_factor, workers)
    return BoxStability(points, small, large)


# gasket profile ----------------------------------------------------------

@dataclass
class GasketProfile:
    domain: Domain
    mesh: float
    points: tuple
    hits: np.ndarray = field(repr=False)
    columns: dict = field(repr=False, default_factory=dict)

    def event(self, z) -> np.ndarray:
        return self.hits[:, self.columns[as_point(z)]]

    def estimate(self, z) -> Estimate:
        return Estimate.from_samples(self.event(z))

    def ratio(self, z1, z2) -> RatioEstimate:
        return ratio_from_counts(joint_counts(self.event(z1), self.event(z2)))

    def target(self, z1, z2) -> float:
        r1 = self.domain.conformal_radius(z1)
        r2 = self.domain.conformal_radius(z2)
        return (r1 / r2) ** (-BULK_EXPONENT)

    def rows(self) -> list[dict]:
        ref = self.points[0]
        return [_row("gasket", f"z={_fmt(z)}", x=z.real, y=z.imag, mesh=self.mesh, estimate=self.estimate(z),
                     ratio=self.ratio(z, ref), target=self.target(z, ref),
                     conformal_radius=self.domain.conformal_radius(z))
                for z in self.points]

    def checks(self, th=DEFAULT_THRESHOLDS) -> list[Check]:
        ref = self.points[0]
        return [ratio_check(f"gasket p({_fmt(ref)})/p({_fmt(z)})", self.ratio(ref, z), self.target(ref, z),
                            th["gasket_rel_tol"], th["nsigma"])
                for z in self.points[1:]]


def gasket_profile(dom: Domain, points: Sequence, mesh: float, n: int, seed: int,
                   workers: int | None = None, method: str = "sweep") -> GasketProfile:
    """Gasket membership of every point on shared configurations.

    ``method="sweep"`` marks the whole gasket with one collar-seeded
    exploration per sample; ``method="points"`` explores from each point
    until it reaches the collar.  Both give identical per-sample outcomes;
    the point method is cheaper when there are few points.
    """
    points = tuple(dict.fromkeys(as_point(z) for z in points))
    g = LatticeGeometry(mesh)
    if method == "sweep":
        problem = gasket_sweep_problem(points, dom, g)
        _, _, hits, _, _ = _bfs.run_batch(problem, seed, n, workers=workers)
        from .lattice import nearest_site

        col = {s: k for k, s in enumerate(problem.target_sites)}
        columns = {z: col[nearest_site(z, g)] for z in points}
    elif method == "points":
        hits = np.stack([_bfs.run_batch(gasket_problem(z, dom, g), seed, n, workers=workers)[0]
                         for z in points], axis=1)
        columns = {z: k for k, z in enumerate(points)}
    else:
        raise ValueError(f"unknown gasket method {method!r}")
    return GasketProfile(dom, mesh, points, hits, columns)


# method of images -------------------------------------------------------

@dataclass
class ImagesReport:
    z: complex
    mesh: float
    upper: np.ndarray = field(repr=False)
    lower: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.upper.size

    @property
    def both(self) -> np.ndarray:
        return self.upper & self.lower

    @property
    def p_u(self) -> float:
        return float(self.upper.mean())

    @property
    def p_l(self) -> float:
        return float(self.lower.mean())

    @property
    def p_both(self) -> float:
        return float(self.both.mean())

    @property
    def z_product(self) -> float:
        u = self.upper.astype(float)
        l = self.lower.astype(float)
        influence = u * l - self.p_l * u - self.p_u * l
        sd = influence.std() / math.sqrt(self.n)
        d = self.p_both - self.p_u * self.p_l
        return d / sd if sd > 0 else 0.0

    @property
    def z_symmetry(self) -> float:
        diff = self.upper.astype(float) - self.lower.astype(float)
        sd = diff.std() / math.sqrt(self.n)
        return (self.p_u - self.p_l) / sd if sd > 0 else 0.0

    def rows(self) -> list[dict]:
        z = self.z
        out = [_row("images", name, x=z.real, y=z.imag, mesh=self.mesh, estimate=Estimate.from_samples(ev))
               for name, ev in (("upper", self.upper), ("lower", self.lower), ("both", self.both))]
        out.append({"experiment": "images", "label": "z_product", "ratio": self.z_product, "target": 0.0})
        out.append({"experiment": "images", "label": "z_symmetry", "ratio": self.z_symmetry, "target": 0.0})
        return out

    def checks(self, th=DEFAULT_THRESHOLDS) -> list[Check]:
        k = th["nsigma"]
        return [
            Check("images product P(A)=P_u P_l", self.p_both, self.p_u * self.p_l, k, self.z_product,
                  abs(self.z_product) < k),
            Check("images symmetry P_u=P_l", self.p_u, self.p_l, k, self.z_symmetry, abs(self.z_symmetry) < k),
            Check("images both implies upper", int(np.count_nonzero(self.both & ~self.upper)), 0, 0, 0.0,
                  not (self.both & ~self.upper).any()),
        ]


def images_check(z, mesh: float, n: int, seed: int, box_factor: float = DEFAULT_BOX_FACTOR,
                 workers: int | None = None) -> ImagesReport:
    """Anchored event and its reflection on the same sample keys (disjoint site sets)."""
    z = as_point(z)
    problem = anchored_problem([z], LatticeGeometry(mesh), box_factor)
    up = _bfs.run_batch(problem, seed, n, workers=workers)[2][:, 0]
    low = _bfs.run_batch(problem.reflected(), seed, n, workers=workers)[2][:, 0]
    return ImagesReport(z, mesh, up, low)


# multipoint scale covariance ------------------------------------------

def multipoint_exponent(k: int, n: int) -> float:
    return -(BULK_EXPONENT * k + BOUNDARY_EXPONENT * n)


@dataclass
class MultipointReport:
    bulk: tuple
    boundary: tuple
    scale: float
    mesh: float
    original: np.ndarray = field(repr=False)
    scaled: np.ndarray = field(repr=False)

    @property
    def target(self) -> float:
        return self.scale ** multipoint_exponent(len(self.bulk), len(self.boundary))

    @property
    def ratio(self) -> RatioEstimate:
        return ratio_from_counts(joint_counts(self.scaled, self.original))

    def rows(self) -> list[dict]:
        return [
            _row("multipoint", "original", mesh=self.mesh, estimate=Estimate.from_samples(self.original)),
            _row("multipoint", f"scaled s={self.scale:g}", mesh=self.mesh,
                 estimate=Estimate.from_samples(self.scaled), ratio=self.ratio, target=self.target),
        ]

    def checks(self, th=DEFAULT_THRESHOLDS) -> list[Check]:
        k, n = len(self.bulk), len(self.boundary)
        return [ratio_check(f"multipoint k={k} n={n} s={self.scale:g}", self.ratio, self.target,
                            th["multipoint_rel_tol"], th["nsigma"])]


def multipoint_covariance(bulk: Sequence, boundary: Sequence[float], s: float, mesh: float, n: int,
                          seed: int, box_factor: float = DEFAULT_BOX_FACTOR,
                          workers: int | None = None) -> MultipointReport:
    if not s > 0:
        raise ValueError("scale factor must be positive")
    bulk = tuple(as_point(z) for z in bulk)
    boundary = tuple(float(x) for x in boundary)
    g = LatticeGeometry(mesh)

    def run(b, x):
        p = multipoint_problem(b, x, g, box_factor)
        _, _, hits, maxd4, _ = _bfs.run_batch(p, seed, n, workers=workers)
        return (maxd4 >= 0) & hits.all(axis=1)

    original = run(bulk, boundary)
    scaled = original if s == 1 else run(tuple(s * z for z in bulk), tuple(s * x for x in boundary))
    return MultipointReport(bulk, boundary, s, mesh, original, scaled)


# normalization stability ------------------------------------------------

@dataclass
class MeshStability:
    meshes: tuple
    gasket: list
    arm: list
    ratios: list

    def rows(self) -> list[dict]:
        out = []
        for m, ga, ar, r in zip(self.meshes, self.gasket, self.arm, self.ratios):
            out.append(_row("mesh-stability", f"gasket mesh={m:g}", mesh=m, estimate=ga))
            out.append(_row("mesh-stability", f"pi_a mesh={m:g}", mesh=m, estimate=ar, ratio=r))
        return out

    def checks(self, th=DEFAULT_THRESHOLDS) -> list[Check]:
        c0, c1 = self.ratios[0].ratio, self.ratios[-1].ratio
        change = abs(c1 - c0) / c0
        se = math.hypot(self.ratios[0].stderr, self.ratios[-1].stderr) / c0
        return [Check("renormalized gasket density stability", change, 0.0, th["mesh_stability_rel"],
                      change / se if se > 0 else 0.0, change < th["mesh_stability_rel"])]


def mesh_stability(meshes: Sequence[float], n: int, seed: int, z=0j, dom: Domain | None = None,
                   workers: int | None = None) -> MeshStability:
    """``P(z -- boundary of D) / pi_a`` across meshes (``D`` the unit disk by default)."""
    dom = dom if dom is not None else Disk(0j, 1.0)
    gas, arm, rat = [], [], []
    for m in meshes:
        g = LatticeGeometry(m)
        a = _bfs.run_batch(gasket_problem(z, dom, g), seed, n, workers=workers)[0]
        b = _bfs.run_batch(one_arm_problem(z, 1.0, g), seed, n, workers=workers)[0]
        gas.append(Estimate.from_samples(a))
        arm.append(Estimate.from_samples(b))
        rat.append(ratio_from_counts(joint_counts(a, b)))
    return MeshStability(tuple(meshes), gas, arm, rat)
