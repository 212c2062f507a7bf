"""Per-sample implications between detectors, audited on shared sample keys."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import Disk
from .estimators import EventSpec, evaluate
from .experiments import arm_sweep, gasket_profile
from .lattice import Half, LatticeGeometry, nearest_site, position


@dataclass(frozen=True)
class AuditLine:
    name: str
    samples: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.violations} violations / {self.samples} samples"


def _implies(a, b) -> int:
    return int(np.count_nonzero(np.asarray(a) & ~np.asarray(b)))


def audit(n: int = 10_000, seed: int = 0, mesh: float = 1 / 16, workers: int | None = None) -> list[AuditLine]:
    """Check every per-sample implication between detectors on ``n`` shared samples."""
    g = LatticeGeometry(mesh)

    def ev(spec):
        return evaluate(spec, seed, n, workers=workers)

    z = 0.2 + 0.5j
    za = position(nearest_site(z, g, Half.UPPER), g)
    eps_pair = 0.45 * za.imag
    anch = ev(EventSpec("anchored", mesh=mesh, z=z, box_factor=4.0)).event
    anch_wide = ev(EventSpec("anchored", mesh=mesh, z=z, box_factor=8.0)).event
    anch_tight = ev(EventSpec("anchored", mesh=mesh, z=z, box_factor=2.0)).event
    bulk_arm = ev(EventSpec("one_arm", mesh=mesh, z=z, eps=eps_pair)).event
    bnd_arm = ev(EventSpec("boundary_arm", mesh=mesh, eps=eps_pair)).event

    lines = [AuditLine("anchored => bulk one-arm and boundary one-arm", n, _implies(anch, bulk_arm & bnd_arm))]

    dom = Disk(0j, 1.0)
    zg = 0.3 + 0.1j
    zga = position(nearest_site(zg, g), g)
    eps_g = 0.95 * dom.boundary_distance(zga)
    gas = ev(EventSpec("gasket", mesh=mesh, z=zg, domain=dom)).event
    arm_g = ev(EventSpec("one_arm", mesh=mesh, z=zg, eps=eps_g)).event
    lines.append(AuditLine("gasket => one-arm inside the domain", n, _implies(gas, arm_g)))

    small, large = 0.1, 0.3
    a_small = ev(EventSpec("one_arm", mesh=mesh, z=zg, eps=small)).event
    a_large = ev(EventSpec("one_arm", mesh=mesh, z=zg, eps=large)).event
    b_small = ev(EventSpec("boundary_arm", mesh=mesh, eps=small)).event
    b_large = ev(EventSpec("boundary_arm", mesh=mesh, eps=large)).event
    lines.append(AuditLine("bulk one-arm monotone in eps", n, _implies(a_large, a_small)))
    lines.append(AuditLine("boundary one-arm monotone in eps", n, _implies(b_large, b_small)))

    lines.append(AuditLine("anchored monotone in box (2 -> 4)", n, _implies(anch_tight, anch)))
    lines.append(AuditLine("anchored monotone in box (4 -> 8)", n, _implies(anch, anch_wide)))

    img = ev(EventSpec("images", mesh=mesh, z=z, box_factor=4.0)).parts
    lines.append(AuditLine("images: both = upper and lower", n,
                           int(np.count_nonzero(img["both"] != (img["upper"] & img["lower"])))))
    lines.append(AuditLine("images: upper event = anchored event", n, int(np.count_nonzero(img["upper"] != anch))))

    mp = ev(EventSpec("multipoint", mesh=mesh, bulk=(z,), boundary=(0.0,), box_factor=4.0)).event
    lines.append(AuditLine("multipoint(k=1, n=1, x=0) = anchored", n, int(np.count_nonzero(mp != anch))))

    pts = [0j, 0.5 + 0j, 0.3 + 0.1j]
    sweep = gasket_profile(dom, pts, mesh, n, seed, workers, method="sweep")
    point = gasket_profile(dom, pts, mesh, n, seed, workers, method="points")
    lines.append(AuditLine("gasket sweep = pointwise gasket", n, int(np.count_nonzero(sweep.hits != point.hits))))

    eps = (0.1, 0.2, 0.3)
    sw = arm_sweep("one_arm", eps, mesh, n, seed, z=zg, workers=workers)
    single = np.stack([ev(EventSpec("one_arm", mesh=mesh, z=zg, eps=e)).event for e in eps])
    lines.append(AuditLine("eps sweep = separate one-arm explorations", n,
                           int(np.count_nonzero((sw.events != single).any(axis=0)))))
    return lines
