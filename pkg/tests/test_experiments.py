import cmath
import math

import numpy as np
import pytest

from critperc.domains import Disk, Scaled, UpperHalfPlane
from critperc.estimators import Estimate
from critperc.experiments import (
    anchored_profile,
    anchored_target_ratio,
    arm_sweep,
    box_stability,
    gasket_profile,
    images_check,
    mesh_stability,
    multipoint_covariance,
    multipoint_exponent,
)


def test_target_arithmetic():
    assert anchored_target_ratio(0.5j, 0.5 * cmath.exp(1j * math.pi / 6)) == pytest.approx(1.172158, abs=1e-6)
    assert anchored_target_ratio(0.25j, 0.5j) == pytest.approx(1.354256, abs=1e-6)
    assert anchored_target_ratio(0.5j, 0.25j) == pytest.approx(1 / 1.354256, abs=1e-6)
    assert 2 ** multipoint_exponent(1, 2) == pytest.approx(0.586079, abs=1e-6)
    prof = gasket_profile(Disk(0j, 1.0), [0.9, 0j], 1 / 8, 10, 0, method="points")
    assert prof.target(0.9, 0j) == pytest.approx(1.188858, abs=1e-6)


def test_anchored_mirror_symmetry():
    # x -> -x is a lattice symmetry only up to the snapping, so compare estimates
    prof = anchored_profile([0.3 + 0.4j, -0.3 + 0.4j], 1 / 16, 20_000, 1)
    r = prof.ratio(0.3 + 0.4j, -0.3 + 0.4j)
    assert abs(r.ratio - 1) <= max(4 * r.stderr, 0.05)


def test_gasket_rotated_copies():
    dom = Disk(0j, 1.0)
    pts = [0.5 * cmath.exp(1j * k * math.pi / 3) for k in range(4)]
    prof = gasket_profile(dom, pts, 1 / 16, 20_000, 2, method="sweep")
    for z in pts[1:]:
        r = prof.ratio(pts[0], z)
        assert abs(r.ratio - 1) <= max(4 * r.stderr, 0.05)


def test_gasket_methods_agree():
    dom = Disk(0j, 1.0)
    pts = [0j, 0.5, 0.3j]
    a = gasket_profile(dom, pts, 1 / 16, 2000, 3, method="sweep")
    b = gasket_profile(dom, pts, 1 / 16, 2000, 3, method="points")
    for z in pts:
        assert np.array_equal(a.event(z), b.event(z))


def test_gasket_unknown_method():
    with pytest.raises(ValueError):
        gasket_profile(Disk(0j, 1.0), [0j], 1 / 8, 10, 0, method="magic")


def test_conformal_covariance_disk_vs_halfplane():
    # the disk at 0 and the half-plane at i/2 have the same conformal radius
    disk = gasket_profile(Disk(0j, 1.0), [0j], 1 / 16, 20_000, 4, method="points").estimate(0j)
    half = gasket_profile(UpperHalfPlane(), [0.5j], 1 / 16, 20_000, 4, method="points").estimate(0.5j)
    assert abs(disk.p_hat - half.p_hat) / disk.p_hat < 0.1


def test_scaled_domain_matches_scaled_mesh():
    big = gasket_profile(Scaled(Disk(0j, 1.0), 2.0), [0j], 1 / 8, 5000, 6, method="points")
    small = gasket_profile(Disk(0j, 1.0), [0j], 1 / 16, 5000, 6, method="points")
    assert np.array_equal(big.event(0j), small.event(0j))


def test_multipoint_unit_scale_is_exactly_one():
    rep = multipoint_covariance([0.25j], [-0.125, 0.125], 1.0, 1 / 32, 3000, 5)
    assert rep.ratio.ratio == 1.0 and rep.ratio.stderr == 0.0


def test_multipoint_rejects_bad_scale():
    with pytest.raises(ValueError):
        multipoint_covariance([0.25j], [0.0], 0.0, 1 / 32, 10, 0)


def test_box_stability_small():
    bs = box_stability([0.5j], 1 / 16, 20_000, 8)
    a, b = bs.small.estimate(0.5j), bs.large.estimate(0.5j)
    # monotone in the box: a larger box never loses a connection
    assert b.p_hat >= a.p_hat
    assert np.all(bs.large.event(0.5j) >= bs.small.event(0.5j))
    assert all(c.passed for c in bs.checks())


def test_arm_sweep_small():
    sw = arm_sweep("one_arm", [1 / 8, 1 / 4, 1 / 2], 1 / 32, 20_000, 6)
    assert sw.fit.slope < 0
    ps = [e.p_hat for e in sw.estimates]
    assert ps == sorted(ps, reverse=True)


def test_images_small():
    rep = images_check(1j, 1 / 8, 20_000, 6)
    assert np.array_equal(rep.both, rep.upper & rep.lower)
    assert all(c.passed for c in rep.checks())


def test_mesh_stability_trivial_at_center():
    ms = mesh_stability([1 / 16, 1 / 32], 2000, 0)
    for r in ms.ratios:
        assert r.ratio == 1.0
