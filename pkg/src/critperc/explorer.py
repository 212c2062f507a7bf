"""Connection-event detectors built on breadth-first cluster exploration.

Every detector compiles to a :class:`Problem` (a window of site codes plus
start and target sites) and is evaluated by the batch kernel in
``_bfs``.  The per-sample functions here evaluate a single
:class:`~critperc.randomness.SampleKey`; estimators evaluate the same
problems over whole sample ranges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _bfs
from .domains import Disk, Domain, DomainError, site_window
from .lattice import (
    Half,
    LatticeGeometry,
    ORIGIN,
    SiteCoord,
    as_point,
    boundary_site,
    nearest_site,
    position,
    positions,
)
from .randomness import SampleKey

DEFAULT_BOX_FACTOR = 4.0
MAX_TARGETS = 8000


# regions -----------------------------------------------------------------

class Region:
    """Membership predicate over lattice sites."""

    def contains_sites(self, i: np.ndarray, j: np.ndarray, mesh: float) -> np.ndarray:
        raise NotImplementedError

    def site_bounds(self, mesh: float):
        """Axial bounding box ``(i_lo, i_hi, j_lo, j_hi)`` or None if unbounded."""
        return None

    def __contains__(self, item):
        c, mesh = item
        return bool(self.contains_sites(np.array([c[0]]), np.array([c[1]]), mesh)[0])

    def __and__(self, other: "Region") -> "Region":
        return Intersection((self, other))


class Everywhere(Region):
    def contains_sites(self, i, j, mesh):
        return np.ones(np.shape(i), dtype=bool)


EVERYWHERE = Everywhere()


@dataclass(frozen=True)
class HalfPlane(Region):
    upper: bool = True

    def contains_sites(self, i, j, mesh):
        j = np.asarray(j)
        return j >= 0 if self.upper else j <= -1


UPPER = HalfPlane(True)
LOWER = HalfPlane(False)


@dataclass(frozen=True)
class DomainRegion(Region):
    """Sites whose position lies in an open planar domain."""

    domain: Domain

    def contains_sites(self, i, j, mesh):
        x, y = positions(i, j, mesh)
        return self.domain.contains_xy(x, y)

    def site_bounds(self, mesh):
        box = self.domain.bbox()
        if box is None:
            return None
        return site_window(*box, LatticeGeometry(mesh), pad=1)


def disk(center, radius: float) -> DomainRegion:
    return DomainRegion(Disk(as_point(center), radius))


@dataclass(frozen=True)
class SiteSet(Region):
    sites: frozenset

    def contains_sites(self, i, j, mesh):
        i = np.asarray(i)
        j = np.asarray(j)
        out = np.zeros(i.shape, dtype=bool)
        for a, b in self.sites:
            out |= (i == a) & (j == b)
        return out

    def site_bounds(self, mesh):
        ii = [c[0] for c in self.sites]
        jj = [c[1] for c in self.sites]
        return min(ii), max(ii), min(jj), max(jj)


@dataclass(frozen=True)
class Intersection(Region):
    parts: tuple

    def contains_sites(self, i, j, mesh):
        out = np.ones(np.shape(i), dtype=bool)
        for p in self.parts:
            out &= p.contains_sites(i, j, mesh)
        return out

    def site_bounds(self, mesh):
        bounds = [b for b in (p.site_bounds(mesh) for p in self.parts) if b is not None]
        if not bounds:
            return None
        return (max(b[0] for b in bounds), min(b[1] for b in bounds),
                max(b[2] for b in bounds), min(b[3] for b in bounds))


# problems ----------------------------------------------------------------

@dataclass
class Problem:
    mask: np.ndarray
    forced: np.ndarray
    oi: int
    oj: int
    starts: np.ndarray
    targets: np.ndarray
    ci: int = 0
    cj: int = 0
    stop_on_escape: bool = False
    stop_on_targets: bool = True
    reflect: bool = False
    target_sites: tuple = ()

    def code(self, c) -> int:
        a, b = c[0] - self.oi, c[1] - self.oj
        if 0 <= a < self.mask.shape[0] and 0 <= b < self.mask.shape[1]:
            return int(self.mask[a, b])
        return 0

    def reflected(self) -> "Problem":
        return replace(self, reflect=not self.reflect)


Forced = "bool | Mapping[SiteCoord, bool] | None"


def compile_problem(starts: Sequence, g: LatticeGeometry, *, region: Region = EVERYWHERE,
                    box: Region | None = None, universe: Region = EVERYWHERE,
                    targets: Iterable = (), center=None, forced=None,
                    stop_on_escape: bool = False, stop_on_targets: bool = True) -> Problem:
    """Build the site-code window for an exploration.

    ``universe`` is the graph the configuration lives on, ``region`` the set
    whose exit counts as escape, ``box`` a safety truncation.
    """
    starts = [SiteCoord(*s) for s in starts]
    target_sites = tuple(dict.fromkeys(SiteCoord(*t) for t in targets))
    if len(target_sites) > MAX_TARGETS:
        raise ValueError(f"at most {MAX_TARGETS} distinct targets per exploration")
    pieces = [p for p in (universe, region, box) if p is not None]
    bounds = Intersection(tuple(pieces)).site_bounds(g.mesh)
    if bounds is None:
        raise ValueError("exploration is unbounded; supply a bounded region or box")
    anchors = starts + list(target_sites)
    i_lo = min([bounds[0]] + [c.i for c in anchors]) - 2
    i_hi = max([bounds[1]] + [c.i for c in anchors]) + 2
    j_lo = min([bounds[2]] + [c.j for c in anchors]) - 2
    j_hi = max([bounds[3]] + [c.j for c in anchors]) + 2
    ii, jj = np.meshgrid(np.arange(i_lo, i_hi + 1), np.arange(j_lo, j_hi + 1), indexing="ij")
    in_u = universe.contains_sites(ii, jj, g.mesh)
    in_r = region.contains_sites(ii, jj, g.mesh)
    in_b = box.contains_sites(ii, jj, g.mesh) if box is not None else np.ones_like(in_u)
    mask = np.where(~in_u, 0, np.where(~in_r, _bfs.EXIT, np.where(~in_b, _bfs.EDGE, _bfs.EXPLORE)))
    mask = mask.astype(np.int8)
    mask[0, :] = mask[-1, :] = 0
    mask[:, 0] = mask[:, -1] = 0
    if (mask[1, :] == 1).any() or (mask[-2, :] == 1).any() or (mask[:, 1] == 1).any() or (mask[:, -2] == 1).any():
        raise ValueError("explorable sites reach the window edge; region bounds are inconsistent")
    force = np.full(mask.shape, -1, dtype=np.int8)
    if forced is True:
        force[:] = 1
    elif forced is False:
        force[:] = 0
    elif forced:
        for (a, b), value in forced.items():
            if i_lo <= a <= i_hi and j_lo <= b <= j_hi:
                force[a - i_lo, b - j_lo] = 1 if value else 0
    c = SiteCoord(*center) if center is not None else (starts[0] if starts else ORIGIN)
    return Problem(
        mask=mask,
        forced=force,
        oi=i_lo,
        oj=j_lo,
        starts=np.array([tuple(s) for s in starts], dtype=np.int64).reshape(-1, 2),
        targets=np.array([tuple(t) for t in target_sites], dtype=np.int64).reshape(-1, 2),
        ci=c.i,
        cj=c.j,
        stop_on_escape=stop_on_escape,
        stop_on_targets=stop_on_targets and bool(target_sites),
        target_sites=target_sites,
    )


@dataclass
class ExplorationResult:
    escaped: bool = False
    targets_hit: frozenset = frozenset()
    visited_count: int = 0
    truncated: bool = False
    max_dist4: int = -1


def run_single(problem: Problem, k: SampleKey) -> ExplorationResult:
    esc, trunc, hits, maxd4, visited = _bfs.run_batch(problem, k.seed, 1, start=k.sample, workers=1)
    hit = frozenset(t for t, h in zip(problem.target_sites, hits[0]) if h)
    return ExplorationResult(bool(esc[0]), hit, int(visited[0]), bool(trunc[0]), int(maxd4[0]))


def explore(k: SampleKey, start, region: Region = EVERYWHERE, targets: Iterable = (),
            box: Region | None = None, g: LatticeGeometry = LatticeGeometry(), *,
            universe: Region = EVERYWHERE, forced=None, stop_on_escape: bool = False) -> ExplorationResult:
    """Explore the open cluster of ``start`` inside ``region ∩ box``.

    ``escaped`` reports an open site outside ``region`` adjacent to the
    cluster; ``truncated`` an open site cut off by ``box``.
    """
    start = SiteCoord(*start)
    p = compile_problem([start], g, region=region, box=box, universe=universe, targets=targets,
                        forced=forced, stop_on_escape=stop_on_escape)
    if p.code(start) != _bfs.EXPLORE:
        raise ValueError(f"start {tuple(start)} is not inside region ∩ box")
    return run_single(p, k)


# problem builders ---------------------------------------------------------

def _radius_region(center: SiteCoord, eps: float, g: LatticeGeometry) -> DomainRegion:
    return disk(position(center, g), eps)


def one_arm_problem(z, eps: float, g: LatticeGeometry, forced=None) -> Problem:
    """Cluster of ``z^a`` leaves the open disk of radius ``eps`` around ``z^a``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    za = nearest_site(z, g)
    return compile_problem([za], g, region=_radius_region(za, eps, g), forced=forced,
                           stop_on_escape=True, center=za)


def boundary_arm_problem(eps: float, g: LatticeGeometry, forced=None) -> Problem:
    if not eps > 0:
        raise ValueError("eps must be positive")
    return compile_problem([ORIGIN], g, region=_radius_region(ORIGIN, eps, g), universe=UPPER,
                           forced=forced, stop_on_escape=True, center=ORIGIN)


def anchored_box(points: Sequence[complex], box_factor: float) -> DomainRegion:
    rmax = max(abs(as_point(z)) for z in points)
    return disk(0j, box_factor * rmax)


def anchored_problem(points, g: LatticeGeometry, box_factor: float = DEFAULT_BOX_FACTOR,
                     forced=None, universe: Region = UPPER) -> Problem:
    """Half-plane cluster of the origin, with every point of ``points`` as a target."""
    if isinstance(points, (complex, float, int)):
        points = [points]
    points = [as_point(z) for z in points]
    if any(z.imag <= 0 for z in points):
        raise ValueError("anchored points must lie strictly above the real axis")
    if box_factor < 2:
        raise ValueError("box_factor must be at least 2")
    sites = [nearest_site(z, g, Half.UPPER) for z in points]
    return compile_problem([ORIGIN], g, box=anchored_box(points, box_factor), universe=universe,
                           targets=sites, forced=forced)


def multipoint_problem(bulk: Sequence, boundary: Sequence[float], g: LatticeGeometry,
                       box_factor: float = DEFAULT_BOX_FACTOR, forced=None,
                       universe: Region = UPPER) -> Problem:
    bulk = [as_point(z) for z in bulk]
    boundary = [float(x) for x in boundary]
    if not bulk or not boundary:
        raise ValueError("multipoint needs at least one bulk and one boundary point")
    if any(z.imag <= 0 for z in bulk):
        raise ValueError("bulk points must lie strictly above the real axis")
    bsites = [boundary_site(x, g) for x in boundary]
    zsites = [nearest_site(z, g, Half.UPPER) for z in bulk]
    norms = [abs(z) for z in bulk] + [abs(x) for x in boundary]
    box = disk(0j, box_factor * max(norms))
    # start from a boundary point: boundary clusters die fastest
    return compile_problem([bsites[0]], g, box=box, universe=universe,
                           targets=bsites[1:] + zsites, forced=forced)


def gasket_problem(z, dom: Domain, g: LatticeGeometry, box_factor: float = DEFAULT_BOX_FACTOR,
                   forced=None) -> Problem:
    z = as_point(z)
    if not dom.contains(z):
        raise DomainError(f"{z} is not inside {dom}")
    za = nearest_site(z, g)
    box = None
    if not dom.bounded:
        box = disk(z, box_factor * dom.boundary_distance(z))
    return compile_problem([za], g, region=DomainRegion(dom), box=box, forced=forced,
                           stop_on_escape=True, center=za)


def gasket_sweep_problem(points: Sequence, dom: Domain, g: LatticeGeometry, forced=None) -> Problem:
    """Multi-source exploration from every exterior collar site of a bounded domain.

    A target is hit iff its open cluster contains an open collar site, i.e.
    iff it belongs to the gasket of ``dom``.
    """
    from .domains import exterior_collar

    if not dom.bounded:
        raise DomainError("gasket sweeps need a bounded domain")
    points = [as_point(z) for z in points]
    for z in points:
        if not dom.contains(z):
            raise DomainError(f"{z} is not inside {dom}")
    collar = sorted(exterior_collar(dom, g))
    sites = [nearest_site(z, g) for z in points]
    return compile_problem(collar, g, universe=WithCollar(dom), targets=sites, forced=forced)


@dataclass(frozen=True)
class WithCollar(Region):
    """Sites of a bounded domain together with their exterior neighbors."""

    domain: Domain

    def contains_sites(self, i, j, mesh):
        from .lattice import OFFSETS

        inner = DomainRegion(self.domain)
        i = np.asarray(i)
        j = np.asarray(j)
        out = inner.contains_sites(i, j, mesh)
        for di, dj in OFFSETS:
            out |= inner.contains_sites(i + di, j + dj, mesh)
        return out

    def site_bounds(self, mesh):
        b = DomainRegion(self.domain).site_bounds(mesh)
        return b[0] - 1, b[1] + 1, b[2] - 1, b[3] + 1


# per-sample detectors -----------------------------------------------------

def one_arm(k: SampleKey, z, eps: float, g: LatticeGeometry, forced=None) -> bool:
    return run_single(one_arm_problem(z, eps, g, forced), k).escaped


def boundary_one_arm(k: SampleKey, eps: float, g: LatticeGeometry, forced=None) -> bool:
    return run_single(boundary_arm_problem(eps, g, forced), k).escaped


def anchored(k: SampleKey, z, g: LatticeGeometry, box_factor: float = DEFAULT_BOX_FACTOR,
             forced=None) -> bool:
    p = anchored_problem([z], g, box_factor, forced)
    return len(run_single(p, k).targets_hit) == len(p.target_sites)


def multipoint(k: SampleKey, bulk, boundary, g: LatticeGeometry,
               box_factor: float = DEFAULT_BOX_FACTOR, forced=None) -> bool:
    p = multipoint_problem(bulk, boundary, g, box_factor, forced)
    r = run_single(p, k)
    return _start_open(p, r) and len(r.targets_hit) == len(p.target_sites)


def _start_open(p: Problem, r: ExplorationResult) -> bool:
    # the start is open iff the exploration found at least one site
    return r.max_dist4 >= 0


def gasket_hit(k: SampleKey, z, dom: Domain, g: LatticeGeometry,
               box_factor: float = DEFAULT_BOX_FACTOR, forced=None) -> bool:
    return run_single(gasket_problem(z, dom, g, box_factor, forced), k).escaped


def images_event(k_u: SampleKey, k_l: SampleKey, z, g: LatticeGeometry,
                 box_factor: float = DEFAULT_BOX_FACTOR, forced=None) -> tuple[bool, bool, bool]:
    """Anchored event above the axis and its mirror image below it.

    The lower event is evaluated on the upper-plane window with every site
    lookup passed through ``reflect_lower``.
    """
    p = anchored_problem([z], g, box_factor, forced)
    upper = len(run_single(p, k_u).targets_hit) == 1
    lower = len(run_single(p.reflected(), k_l).targets_hit) == 1
    return upper, lower, upper and lower
