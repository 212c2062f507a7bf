"""Exact event probabilities on small patches by exhaustive enumeration.

Independent of the exploration kernel: clusters are computed by label
propagation over all ``2**m`` configurations of the free sites at once.
Exit sites (whose only role is "open or not, adjacent to the cluster") are
integrated analytically, so a patch with ``m`` free sites and any number of
exits costs ``2**m`` configurations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .domains import Disk
from .estimators import EventSpec
from .lattice import LatticeGeometry, SiteCoord, dist4, nearest_site, neighbors, position

MAX_FREE = 22


@dataclass(frozen=True)
class Patch:
    """Free sites, analytic exit sites and the event read off them."""

    name: str
    free: tuple
    starts: tuple
    exits: tuple = ()
    targets: tuple = ()
    spec: EventSpec | None = None
    require_start_open: bool = True

    @property
    def sites(self) -> frozenset:
        return frozenset(self.free) | frozenset(self.exits)


def _configs(m: int) -> np.ndarray:
    codes = np.arange(1 << m, dtype=np.uint32)
    return ((codes[None, :] >> np.arange(m, dtype=np.uint32)[:, None]) & 1).astype(bool)


def reach_sets(free, starts, is_open: np.ndarray) -> np.ndarray:
    """Boolean ``(m, ncfg)`` array: free site reached from an open start through open free sites."""
    index = {c: k for k, c in enumerate(free)}
    adj = [[index[n] for n in neighbors(c) if n in index] for c in free]
    reach = np.zeros_like(is_open)
    for s in starts:
        k = index[s]
        reach[k] = is_open[k]
    changed = True
    while changed:
        changed = False
        for k, nbrs in enumerate(adj):
            if not nbrs:
                continue
            acc = reach[nbrs[0]].copy()
            for q in nbrs[1:]:
                acc |= reach[q]
            new = reach[k] | (acc & is_open[k])
            if (new != reach[k]).any():
                reach[k] = new
                changed = True
    return reach


def exact_probability(patch: Patch) -> Fraction:
    free = list(patch.free)
    m = len(free)
    if m > MAX_FREE:
        raise ValueError(f"{m} free sites is too many to enumerate")
    is_open = _configs(m)
    reach = reach_sets(free, patch.starts, is_open)
    index = {c: k for k, c in enumerate(free)}
    ok = np.ones(1 << m, dtype=bool)
    if patch.require_start_open:
        for s in patch.starts:
            ok &= is_open[index[s]]
    for t in patch.targets:
        ok &= reach[index[t]]
    total = 1 << m
    if not patch.exits:
        return Fraction(int(np.count_nonzero(ok)), total)
    # number of exit sites touching the reached cluster, per configuration
    touching = np.zeros(1 << m, dtype=np.int64)
    for e in patch.exits:
        adj = [index[n] for n in neighbors(e) if n in index]
        hit = np.zeros(1 << m, dtype=bool)
        for q in adj:
            hit |= reach[q]
        touching += hit
    counts = np.bincount(touching[ok], minlength=len(patch.exits) + 1)
    e = len(patch.exits)
    num = sum(int(c) * ((1 << e) - (1 << (e - t))) for t, c in enumerate(counts))
    return Fraction(num, total << e)


# standard patches ----------------------------------------------------------

def _ball(center: SiteCoord, radius4: float, upper: bool = False):
    r = math.isqrt(int(radius4)) + 2
    out = []
    for i in range(center.i - 2 * r, center.i + 2 * r + 1):
        for j in range(center.j - r, center.j + r + 1):
            c = SiteCoord(i, j)
            if upper and j < 0:
                continue
            if dist4(c, center) < radius4:
                out.append(c)
    return sorted(out)


def _collar(free, upper: bool = False):
    fs = set(free)
    return sorted({n for c in free for n in neighbors(c) if n not in fs and (not upper or n.j >= 0)})


def one_arm_patch(eps: float, mesh: float = 1.0, z: complex = 0j) -> Patch:
    g = LatticeGeometry(mesh)
    za = nearest_site(z, g)
    free = _ball(za, 4 * (eps / mesh) ** 2 * (1 - 1e-12))
    return Patch(f"one_arm eps={eps:g} mesh={mesh:g}", tuple(free), (za,), tuple(_collar(free)),
                 spec=EventSpec("one_arm", mesh=mesh, z=z, eps=eps))


def boundary_arm_patch(eps: float, mesh: float = 1.0) -> Patch:
    o = SiteCoord(0, 0)
    free = _ball(o, 4 * (eps / mesh) ** 2 * (1 - 1e-12), upper=True)
    return Patch(f"boundary_arm eps={eps:g} mesh={mesh:g}", tuple(free), (o,),
                 tuple(_collar(free, upper=True)), spec=EventSpec("boundary_arm", mesh=mesh, eps=eps))


def rect(i_range, j_range):
    return tuple(SiteCoord(i, j) for i in i_range for j in j_range)


def anchored_patch() -> Patch:
    """4x4 half-plane patch, target two rows above the origin."""
    free = rect(range(-1, 3), range(0, 4))
    g = LatticeGeometry(1.0)
    target = SiteCoord(0, 2)
    z = position(target, g)
    return Patch("anchored 4x4", free, (SiteCoord(0, 0),), targets=(target,),
                 spec=EventSpec("anchored", mesh=1.0, z=z, box_factor=4.0, patch=frozenset(free)))


def multipoint_patch() -> Patch:
    """5x4 half-plane patch, two bulk points and one boundary point."""
    free = rect(range(-2, 3), range(0, 4))
    g = LatticeGeometry(1.0)
    bulk = (SiteCoord(-1, 3), SiteCoord(1, 2))
    zs = tuple(position(c, g) for c in bulk)
    return Patch("multipoint 5x4", free, (SiteCoord(0, 0),), targets=bulk,
                 spec=EventSpec("multipoint", mesh=1.0, bulk=zs, boundary=(0.0,), box_factor=4.0,
                                patch=frozenset(free)))


def gasket_patch(z: complex = 0j, mesh: float = 0.5, radius: float = 1.0) -> Patch:
    g = LatticeGeometry(mesh)
    dom = Disk(0j, radius)
    r4 = 4 * (radius / mesh) ** 2 * (1 - 1e-12)
    free = _ball(SiteCoord(0, 0), r4)
    za = nearest_site(z, g)
    return Patch(f"gasket disk z={z} mesh={mesh:g}", tuple(free), (za,), tuple(_collar(free)),
                 spec=EventSpec("gasket", mesh=mesh, z=z, domain=dom))


def standard_patches() -> list[Patch]:
    return [
        one_arm_patch(0.5),
        one_arm_patch(2.0),
        boundary_arm_patch(2.0),
        anchored_patch(),
        multipoint_patch(),
        gasket_patch(0j),
        gasket_patch(0.5 + 0j),
    ]


@dataclass(frozen=True)
class OracleCheck:
    patch: str
    exact: float
    p_hat: float
    n: int
    z: float

    @property
    def passed(self) -> bool:
        return abs(self.z) < 3.0


def check_patch(patch: Patch, n: int, seed: int, workers: int | None = None) -> OracleCheck:
    from dataclasses import replace

    from .estimators import mc_probability

    exact = float(exact_probability(patch))
    spec = patch.spec if patch.spec.patch is not None else replace(patch.spec, patch=patch.sites)
    est = mc_probability(spec, n, seed, workers)
    return OracleCheck(patch.name, exact, est.p_hat, n, est.z_score(exact))
