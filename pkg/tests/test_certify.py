"""Certified lower bounds: dual functionals and surface-energy estimates."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from besovball.certify import (
    Certificate,
    CubeMeasure,
    DerivativeFunctional,
    domination_constant,
    dual_lower_bound,
    energy,
    energy_lower_bound,
    functional_norm,
    param_inv_sq_integral,
)
from besovball.poly import SparsePoly
from besovball.spaces import SpaceSpec, norm_sq

try:
    import mpmath as mp

    HAVE_MPMATH = True
except ImportError:
    HAVE_MPMATH = False

D4 = SpaceSpec.alpha_scale(1, 4)
ONE_MINUS_Z = SparsePoly(1, {(0,): 1, (1,): -1})


# -- functional norm brackets -------------------------------------------------


def test_functional_norm_zeta_anchor():
    # j = 0, alpha = 4: sum 1/(n+1)^4 = pi^4/90
    br = functional_norm(0, 4)
    target = math.pi**4 / 90
    assert br.lower <= target <= br.upper
    assert br.rel_width <= 1e-8


@pytest.mark.skipif(not HAVE_MPMATH, reason="mpmath unavailable")
def test_functional_norm_j1_mpmath_oracle():
    # j = 1, alpha = 4: sum_{n>=1} n^2/(n+1)^4 = zeta(2) - 2 zeta(3) + zeta(4)
    br = functional_norm(1, 4)
    target = float(mp.zeta(2) - 2 * mp.zeta(3) + mp.zeta(4))
    assert br.lower <= target <= br.upper
    assert br.rel_width <= 1e-8


def test_functional_norm_rejects_divergent():
    # the sum only converges once alpha > 2j + 1
    with pytest.raises(ValueError):
        functional_norm(1, 3)
    with pytest.raises(ValueError):
        functional_norm(0, 1)


def test_functional_norm_committed_value():
    br = functional_norm(1, 4)
    inv = 1.0 / br.norm_upper
    assert inv == pytest.approx(1.7591476450870798, rel=1e-9)


def test_derivative_functional_apply():
    fn = DerivativeFunctional(2, 6)
    # (1 - z)^3 has vanishing second derivative at z = 1
    cube = ONE_MINUS_Z * ONE_MINUS_Z * ONE_MINUS_Z
    assert fn.apply(cube) == 0
    sq = ONE_MINUS_Z * ONE_MINUS_Z
    assert fn.apply(sq) == 2
    with pytest.raises(ValueError):
        DerivativeFunctional(2, 4)  # needs alpha > 5


# -- dual certificates ---------------------------------------------------------


def test_dual_certificate_anchor():
    cert = dual_lower_bound(D4, ONE_MINUS_Z, ONE_MINUS_Z * ONE_MINUS_Z, 1)
    assert cert.kind == "dual"
    assert cert.lower_bound == pytest.approx(1.7591476450870798, rel=1e-8)
    back = Certificate.from_json(cert.to_json())
    assert back.lower_bound == cert.lower_bound
    assert back.audit["j"] == 1


def test_dual_certificate_j0():
    cert = dual_lower_bound(D4, SparsePoly.one(1), ONE_MINUS_Z, 0)
    assert cert.lower_bound == pytest.approx(1.0 / math.sqrt(math.pi**4 / 90), rel=1e-8)


def test_dual_certificate_preconditions():
    z = SparsePoly(1, {(1,): 1})
    # h must vanish at 1 to order j + 1
    with pytest.raises(ValueError):
        dual_lower_bound(D4, SparsePoly.one(1), z, 0)
    with pytest.raises(ValueError):
        dual_lower_bound(D4, ONE_MINUS_Z, ONE_MINUS_Z, 1)
    # the functional must see g
    with pytest.raises(ValueError):
        dual_lower_bound(D4, ONE_MINUS_Z, ONE_MINUS_Z, 0)  # g(1) = 0
    # wrong ambient space
    with pytest.raises(ValueError):
        dual_lower_bound(SpaceSpec.drury_arveson(2), SparsePoly.one(1), ONE_MINUS_Z, 0)


def test_dual_certificate_soundness_random_multiples():
    # the certified bound is a true lower bound: no multiple of h gets
    # closer to g than it, checked against explicit random competitors
    import random

    rng = random.Random(4)
    h = ONE_MINUS_Z * ONE_MINUS_Z
    g = ONE_MINUS_Z
    cert = dual_lower_bound(D4, g, h, 1)
    for _ in range(50):
        deg = rng.randint(0, 10)
        p = SparsePoly(
            1, {(i,): Fraction(rng.randint(-8, 8), rng.randint(1, 4)) for i in range(deg + 1)}
        )
        dist = math.sqrt(float(norm_sq(D4, g - p * h)))
        assert dist >= cert.lower_bound - 1e-9


# -- cube measures -------------------------------------------------------------


def test_cube_measure_grid_invariants():
    mu = CubeMeasure.torus(4, 4)
    assert mu.m == 3
    T, Z = mu.grid(6)
    assert T.shape == (6**3, 3)
    assert Z.shape == (6**3, 4)
    # torus points live on the unit sphere of C^4
    dev = np.abs(np.linalg.norm(Z, axis=1) - 1.0).max()
    assert dev <= 1e-12
    assert mu.total_mass == pytest.approx(2.0**3)
    # offset grids never collide
    T2, _ = mu.grid(6, offset=0.5)
    gap = np.abs(T[:, None, :] - T2[None, :, :]).sum(axis=2).min()
    assert gap > 0


def test_cube_measure_scaling():
    mu = CubeMeasure.torus(4, 4)
    half = mu.scaled(0.5)
    assert half.total_mass == pytest.approx(0.5 * mu.total_mass)
    with pytest.raises(ValueError):
        mu.scaled(-1.0)
    with pytest.raises(ValueError):
        CubeMeasure.torus(5, 4)  # k > d
    with pytest.raises(ValueError):
        CubeMeasure.torus(4, 4, shrink=1.5)


def test_sphere_patch_support():
    mu = CubeMeasure.sphere_patch(4, 4)
    assert mu.m == 3
    T, Z = mu.grid(5)
    assert np.abs(np.linalg.norm(Z, axis=1) - 1.0).max() <= 1e-12
    # patch points are real vectors summing their squares to one, so they
    # sit in the zero set of 1 - (z_1^2 + ... + z_4^2)
    s = (Z**2).sum(axis=1)
    assert np.abs(s - 1.0).max() <= 1e-12


def test_energy_requires_enough_legs():
    mu = CubeMeasure.torus(2, 4)  # m = 1
    with pytest.raises(ValueError):
        energy(mu)
    mu3 = CubeMeasure.torus(3, 3)  # m = 2
    with pytest.raises(ValueError):
        energy(mu3)


def test_energy_scaling_quadratic():
    mu = CubeMeasure.torus(4, 4)
    e1 = energy(mu, n_base=6, max_doublings=0)
    e2 = energy(mu.scaled(2.0), n_base=6, max_doublings=0)
    assert e2.value == pytest.approx(4.0 * e1.value, rel=1e-12)
    assert e2.analytic_upper == pytest.approx(4.0 * e1.analytic_upper, rel=1e-12)
    assert e1.value > 0
    assert e1.c_estimate > 0


def test_param_integral_cross_check():
    # the difference-substitution quadrature against a direct double-grid
    # midpoint rule (offset copies, so the diagonal is never hit)
    val, rel, n_final = param_inv_sq_integral(3, n_base=32)
    assert n_final >= 64
    n = 16
    h = 2.0 / n
    ax = -1.0 + (np.arange(n) + 0.5) * h
    mesh = np.meshgrid(ax, ax, ax, indexing="ij")
    T = np.stack([a.ravel() for a in mesh], axis=1)
    ax2 = -1.0 + (np.arange(n) + 1.0) * h
    mesh2 = np.meshgrid(ax2, ax2, ax2, indexing="ij")
    S = np.stack([a.ravel() for a in mesh2], axis=1)
    total = 0.0
    for start in range(0, T.shape[0], 512):
        tb = T[start : start + 512]
        d2 = ((tb[:, None, :] - S[None, :, :]) ** 2).sum(axis=2)
        total += float((1.0 / d2).sum())
    direct = total * h**6
    assert val == pytest.approx(direct, rel=0.1)


def test_energy_certificate_pipeline():
    sp = SpaceSpec.drury_arveson(4)
    f = SparsePoly(4, {(0, 0, 0, 0): 1, (1, 1, 1, 1): -16})
    mu = CubeMeasure.torus(4, 4)
    cert = energy_lower_bound(sp, f, mu)
    assert cert.kind == "energy"
    assert cert.lower_bound == pytest.approx(0.103227, rel=5e-3)
    audit = cert.audit
    assert audit["energy_converged"]
    assert audit["mu_total"] == pytest.approx(8.0)
    assert audit["energy_rel_change_on_doubling"] < 0.02
    assert audit["c_estimate_grid_min"] > 0
    assert audit["max_abs_monomial_pairing_deg6"] < 1e-8 * audit["mu_total"]
    assert audit["support_max_abs_f"] < 1e-10
    assert audit["alt_constant_2_over_c_value"] > 0
    assert audit["energy_quadrature"] <= audit["energy_upper_analytic"]
    back = Certificate.from_json(cert.to_json())
    assert back.audit["mu_total"] == audit["mu_total"]
    assert back.grid["family"] == cert.grid["family"]


def test_energy_certificate_scale_invariance():
    sp = SpaceSpec.drury_arveson(4)
    f = SparsePoly(4, {(0, 0, 0, 0): 1, (1, 1, 1, 1): -16})
    mu = CubeMeasure.torus(4, 4)
    a = energy_lower_bound(sp, f, mu, n_base=6, max_doublings=0)
    b = energy_lower_bound(sp, f, mu.scaled(3.0), n_base=6, max_doublings=0)
    assert b.lower_bound == pytest.approx(a.lower_bound, rel=1e-9)


def test_energy_certificate_preconditions():
    f = SparsePoly(4, {(0, 0, 0, 0): 1, (1, 1, 1, 1): -16})
    mu = CubeMeasure.torus(4, 4)
    with pytest.raises(ValueError):
        energy_lower_bound(SpaceSpec.alpha_scale(4, 1), f, mu, max_doublings=0)
    with pytest.raises(ValueError):
        energy_lower_bound(SpaceSpec.drury_arveson(3), f, mu, max_doublings=0)
    # measure not in the zero set: wrong coefficient
    bad = SparsePoly(4, {(0, 0, 0, 0): 1, (1, 1, 1, 1): -8})
    with pytest.raises(ValueError):
        energy_lower_bound(SpaceSpec.drury_arveson(4), bad, mu, max_doublings=0)


# -- domination constants ------------------------------------------------------


def test_domination_anchors():
    f = ONE_MINUS_Z
    # |f|^1 / |f| is identically one
    assert domination_constant(f, f, 1) == pytest.approx(1.0, abs=1e-12)
    # |1-z|^2 / |1-z| = |1-z| <= 2 on the closed disc
    c = domination_constant(f, f, 2)
    assert 1.5 <= c <= 2.0 + 1e-9
    # j = 0 numerator is 1: the estimate is sup 1/|f|, which grows as the
    # radial grid closes in on the boundary zero
    near = domination_constant(f, f, 0, radii=[0.9])
    nearer = domination_constant(f, f, 0, radii=[0.9, 0.9999])
    assert nearer >= near > 1.0
