import itertools
from fractions import Fraction

import pytest

from critperc.lattice import SiteCoord, neighbors
from critperc.oracle import (
    Patch,
    anchored_patch,
    boundary_arm_patch,
    check_patch,
    exact_probability,
    one_arm_patch,
    rect,
    standard_patches,
)


def brute_force(patch: Patch) -> Fraction:
    """Enumerate free and exit sites together; plain DFS per configuration."""
    sites = list(patch.free) + list(patch.exits)
    free = set(patch.free)
    exits = set(patch.exits)
    good = 0
    for bits in itertools.product((False, True), repeat=len(sites)):
        state = dict(zip(sites, bits))
        if patch.require_start_open and not all(state[s] for s in patch.starts):
            continue
        seen = {s for s in patch.starts if state[s]}
        stack = list(seen)
        escaped = False
        while stack:
            c = stack.pop()
            for n in neighbors(c):
                if n in exits and state[n]:
                    escaped = True
                if n in free and state[n] and n not in seen:
                    seen.add(n)
                    stack.append(n)
        ok = all(t in seen for t in patch.targets)
        if patch.exits:
            ok = ok and escaped
        good += ok
    return Fraction(good, 2 ** len(sites))


def test_one_arm_below_mesh():
    assert exact_probability(one_arm_patch(0.5)) == Fraction(63, 128)


def test_boundary_arm_below_mesh():
    assert exact_probability(boundary_arm_patch(0.5)) == Fraction(15, 32)


def test_single_free_site_no_exits():
    p = Patch("one", (SiteCoord(0, 0),), (SiteCoord(0, 0),))
    assert exact_probability(p) == Fraction(1, 2)


def _small_multipoint():
    free = rect(range(-1, 2), range(0, 3))
    return Patch("mp 3x3", free, (SiteCoord(0, 0),), targets=(SiteCoord(-1, 2), SiteCoord(1, 1)))


def _small_exit_patch():
    free = (SiteCoord(0, 0), SiteCoord(1, 0), SiteCoord(0, 1))
    fs = set(free)
    exits = tuple(sorted({n for c in free for n in neighbors(c) if n not in fs}))[:9]
    return Patch("exits", free, (SiteCoord(0, 0),), exits=exits)


@pytest.mark.parametrize("make", [
    lambda: one_arm_patch(0.5),
    lambda: boundary_arm_patch(0.5),
    anchored_patch,
    _small_multipoint,
    _small_exit_patch,
])
def test_enumeration_matches_brute_force(make):
    patch = make()
    assert exact_probability(patch) == brute_force(patch)


def test_standard_patches_shape():
    patches = standard_patches()
    assert len(patches) >= 5
    kinds = {p.spec.kind for p in patches}
    assert {"one_arm", "anchored", "multipoint", "gasket"} <= kinds
    assert all(len(p.free) <= 20 for p in patches)


@pytest.mark.parametrize("patch", standard_patches(), ids=lambda p: p.name)
def test_mc_agrees_with_enumeration(patch):
    check = check_patch(patch, 100_000, seed=17)
    assert check.passed, check
