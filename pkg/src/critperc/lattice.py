"""Triangular lattice geometry.

Sites are stored in axial coordinates ``(i, j)``; the embedding into the
plane is ``mesh * (i + j/2, j*sqrt(3)/2)``, so the origin of the lattice sits
at the origin of the plane.  Rows ``j >= 0`` form the discrete upper
half-plane, rows ``j <= -1`` the discrete lower half-plane.

Points of the plane are represented as Python complex numbers.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SQRT3 = math.sqrt(3.0)
HALF_SQRT3 = SQRT3 / 2.0

OFFSETS: tuple[tuple[int, int], ...] = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


class SiteCoord(NamedTuple):
    i: int
    j: int


ORIGIN = SiteCoord(0, 0)
LOWER_ORIGIN = SiteCoord(0, -1)


class Half(enum.Enum):
    """Restriction flag used when snapping points to sites."""

    ANY = "any"
    UPPER = "upper"
    LOWER = "lower"

    def admits(self, j: int) -> bool:
        if self is Half.UPPER:
            return j >= 0
        if self is Half.LOWER:
            return j <= -1
        return True


@dataclass(frozen=True)
class LatticeGeometry:
    mesh: float = 1.0

    def __post_init__(self):
        if not self.mesh > 0:
            raise ValueError(f"mesh must be positive, got {self.mesh!r}")

    def lattice_units(self, length: float) -> float:
        """Convert a length in the plane to multiples of the mesh."""
        return length / self.mesh


def as_point(z) -> complex:
    if isinstance(z, (tuple, list)):
        x, y = z
        return complex(x, y)
    return complex(z)


def position(c, g: LatticeGeometry) -> complex:
    i, j = c
    return complex(g.mesh * (i + 0.5 * j), g.mesh * HALF_SQRT3 * j)


def positions(i: np.ndarray, j: np.ndarray, mesh: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``position`` returning ``(x, y)`` arrays."""
    i = np.asarray(i, dtype=np.float64)
    j = np.asarray(j, dtype=np.float64)
    return mesh * (i + 0.5 * j), mesh * HALF_SQRT3 * j


def neighbors(c) -> list[SiteCoord]:
    i, j = c
    return [SiteCoord(i + di, j + dj) for di, dj in OFFSETS]


def dist4(a, b) -> int:
    """Four times the squared distance between two sites, in lattice units.

    Integer valued, which keeps distance comparisons between sites exact.
    """
    di = a[0] - b[0]
    dj = a[1] - b[1]
    return (2 * di + dj) ** 2 + 3 * dj * dj


def in_upper(c) -> bool:
    return c[1] >= 0


def reflect_lower(c) -> SiteCoord:
    """Map a site of the upper half-plane to its mirror image below.

    ``(i, j) -> (i + j, -1 - j)``: a reflection across a horizontal line
    followed by a half-step translation.  Sends ``(0, 0)`` to ``(0, -1)`` and
    preserves adjacency.
    """
    i, j = c
    if j < 0:
        raise ValueError(f"reflect_lower expects an upper half-plane site, got {tuple(c)}")
    return SiteCoord(i + j, -1 - j)


def axial(z: complex, g: LatticeGeometry) -> tuple[float, float]:
    """Fractional axial coordinates of a point."""
    jf = z.imag / (g.mesh * HALF_SQRT3)
    return z.real / g.mesh - 0.5 * jf, jf


def nearest_site(z, g: LatticeGeometry, restrict: Half = Half.ANY) -> SiteCoord:
    """Closest lattice site to ``z``; ties go to the lexicographically smallest site."""
    z = as_point(z)
    if restrict is Half.UPPER and z.imag < 0:
        raise ValueError("point below the real axis cannot be snapped to the upper half-plane")
    if restrict is Half.LOWER and z.imag > 0:
        raise ValueError("point above the real axis cannot be snapped to the lower half-plane")
    fi, fj = axial(z, g)
    i0, j0 = math.floor(fi), math.floor(fj)
    best = None
    best_d = math.inf
    tol = 1e-12 * g.mesh * g.mesh
    for dj in range(-2, 4):
        j = j0 + dj
        if not restrict.admits(j):
            continue
        for di in range(-2, 4):
            i = i0 + di
            w = position((i, j), g)
            d = abs(w - z) ** 2
            if d < best_d - tol or (abs(d - best_d) <= tol and (i, j) < best):
                best, best_d = (i, j), d
    return SiteCoord(*best)


def boundary_site(x: float, g: LatticeGeometry) -> SiteCoord:
    """Nearest row-0 site to the real number ``x``."""
    return nearest_site(complex(x, 0.0), g, Half.UPPER)
