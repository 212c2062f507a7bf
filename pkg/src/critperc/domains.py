"""Simply connected planar domains with closed-form conformal radii.

Domains are open sets.  Membership tests treat points within a relative
``1e-12`` of the boundary as boundary points, so lattice sites that sit on a
circle up to floating-point rounding are consistently classified as exterior.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeGeometry, OFFSETS, SiteCoord, as_point, axial, positions

_REL = 1e-12


class DomainError(ValueError):
    pass


class Domain:
    bounded = False

    def contains(self, z) -> bool:
        z = as_point(z)
        return bool(self.contains_xy(np.array([z.real]), np.array([z.imag]))[0])

    def contains_xy(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def conformal_radius(self, z) -> float:
        z = as_point(z)
        if not self.contains(z):
            raise DomainError(f"{z} is not inside {self}")
        return self._rad(z)

    def _rad(self, z: complex) -> float:
        raise NotImplementedError

    def boundary_distance(self, z) -> float:
        raise NotImplementedError

    def bbox(self) -> tuple[float, float, float, float] | None:
        """``(xmin, xmax, ymin, ymax)`` or None when unbounded."""
        return None

    def spec(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.spec()


@dataclass(frozen=True)
class Disk(Domain):
    center: complex = 0j
    radius: float = 1.0

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError("disk radius must be positive")
        object.__setattr__(self, "center", as_point(self.center))

    @property
    def bounded(self):
        return True

    def contains_xy(self, x, y):
        r2 = self.radius * self.radius
        d2 = (x - self.center.real) ** 2 + (y - self.center.imag) ** 2
        return r2 - d2 > _REL * r2

    def _rad(self, z):
        return (self.radius ** 2 - abs(z - self.center) ** 2) / self.radius

    def boundary_distance(self, z):
        return self.radius - abs(as_point(z) - self.center)

    def bbox(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)

    def spec(self):
        return f"disk:{_num(self.center.real)},{_num(self.center.imag)},{_num(self.radius)}"


@dataclass(frozen=True)
class UpperHalfPlane(Domain):
    def contains_xy(self, x, y):
        return y > 0

    def _rad(self, z):
        return 2.0 * z.imag

    def boundary_distance(self, z):
        return as_point(z).imag

    def spec(self):
        return "halfplane"


@dataclass(frozen=True)
class Strip(Domain):
    """``{0 < Im z < height}``."""

    height: float = 1.0

    def __post_init__(self):
        if not self.height > 0:
            raise DomainError("strip height must be positive")

    def contains_xy(self, x, y):
        tol = _REL * self.height
        return (y > tol) & (y < self.height - tol)

    def _rad(self, z):
        h = self.height
        # w -> exp(pi w / h) maps the strip onto the upper half-plane
        return (2.0 * h / math.pi) * math.sin(math.pi * z.imag / h)

    def boundary_distance(self, z):
        y = as_point(z).imag
        return min(y, self.height - y)

    def spec(self):
        return f"strip:{_num(self.height)}"


@dataclass(frozen=True)
class Scaled(Domain):
    """Image of ``base`` under ``z -> scale * z + shift``."""

    base: Domain
    scale: float = 1.0
    shift: complex = 0j

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("scale factor must be positive")
        object.__setattr__(self, "shift", as_point(self.shift))

    @property
    def bounded(self):
        return self.base.bounded

    def _pre(self, z):
        return (z - self.shift) / self.scale

    def contains_xy(self, x, y):
        return self.base.contains_xy((x - self.shift.real) / self.scale, (y - self.shift.imag) / self.scale)

    def _rad(self, z):
        return self.scale * self.base._rad(self._pre(z))

    def boundary_distance(self, z):
        return self.scale * self.base.boundary_distance(self._pre(as_point(z)))

    def bbox(self):
        b = self.base.bbox()
        if b is None:
            return None
        s, t = self.scale, self.shift
        return (s * b[0] + t.real, s * b[1] + t.real, s * b[2] + t.imag, s * b[3] + t.imag)

    def spec(self):
        return f"{self.base.spec()}*{_num(self.scale)}+{_num(self.shift.real)},{_num(self.shift.imag)}"


def conformal_radius(dom: Domain, z) -> float:
    return dom.conformal_radius(z)


def contains(dom: Domain, z) -> bool:
    return dom.contains(z)


def _num(v: float) -> str:
    return repr(float(v)).removesuffix(".0") if float(v).is_integer() else repr(float(v))


_SCALED = re.compile(r"^(?P<base>[^*]+)\*(?P<s>[^+]+)(?:\+(?P<tx>[^,]+),(?P<ty>.+))?$")


def parse_domain(text: str) -> Domain:
    """Parse ``disk:cx,cy,R``, ``halfplane``, ``strip:h`` with optional ``*s+tx,ty``."""
    text = text.strip()
    m = _SCALED.match(text)
    if m:
        base = parse_domain(m["base"])
        shift = complex(float(m["tx"]), float(m["ty"])) if m["tx"] is not None else 0j
        return Scaled(base, _parse_real(m["s"]), shift)
    name, _, args = text.partition(":")
    try:
        if name == "disk":
            cx, cy, r = (_parse_real(a) for a in args.split(","))
            return Disk(complex(cx, cy), r)
        if name == "halfplane" and not args:
            return UpperHalfPlane()
        if name == "strip":
            return Strip(_parse_real(args))
    except ValueError as exc:
        raise DomainError(f"bad domain spec {text!r}: {exc}") from None
    raise DomainError(f"unknown domain spec {text!r}")


def _parse_real(text: str) -> float:
    from fractions import Fraction

    return float(Fraction(text.strip()))


# discretization ----------------------------------------------------------

def site_window(xmin, xmax, ymin, ymax, g: LatticeGeometry, pad: int = 2):
    """Axial index ranges covering a rectangle of the plane."""
    corners = [axial(complex(x, y), g) for x in (xmin, xmax) for y in (ymin, ymax)]
    i_lo = math.floor(min(c[0] for c in corners)) - pad
    i_hi = math.ceil(max(c[0] for c in corners)) + pad
    j_lo = math.floor(min(c[1] for c in corners)) - pad
    j_hi = math.ceil(max(c[1] for c in corners)) + pad
    return i_lo, i_hi, j_lo, j_hi


def interior_sites(dom: Domain, g: LatticeGeometry) -> set[SiteCoord]:
    if not dom.bounded:
        raise DomainError(f"{dom} is unbounded")
    i_lo, i_hi, j_lo, j_hi = site_window(*dom.bbox(), g)
    ii, jj = np.meshgrid(np.arange(i_lo, i_hi + 1), np.arange(j_lo, j_hi + 1), indexing="ij")
    x, y = positions(ii, jj, g.mesh)
    inside = dom.contains_xy(x, y)
    return {SiteCoord(int(a), int(b)) for a, b in zip(ii[inside], jj[inside])}


def exterior_collar(dom: Domain, g: LatticeGeometry) -> set[SiteCoord]:
    """Sites outside ``dom`` adjacent to a site inside it."""
    inside = interior_sites(dom, g)
    collar = set()
    for i, j in inside:
        for di, dj in OFFSETS:
            c = SiteCoord(i + di, j + dj)
            if c not in inside:
                collar.add(c)
    return collar
