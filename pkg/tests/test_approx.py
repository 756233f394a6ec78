"""Finite-dimensional least squares against shifted copies of a polynomial."""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from besovball.approx import (
    ApproximantResult,
    assemble_gram,
    cyclicity_profile,
    distance_profile,
    finite_section_mult_bound,
    graded_monomials,
    hc_profile,
    membership_profile,
    optimal_approximant,
    ratio_norm_sweep,
)
from besovball.poly import SparsePoly
from besovball.scalars import ComplexRational
from besovball.spaces import PointMassAtOne, SpaceSpec, inner_product, norm_sq

try:
    from hypothesis import given, settings
    from hypothesis import strategies as st

    HAVE_HYPOTHESIS = True
except ImportError:
    HAVE_HYPOTHESIS = False

H1 = SpaceSpec.alpha_scale(1, 0)  # Hardy line: every weight is 1
DA2 = SpaceSpec.drury_arveson(2)
ONE_MINUS_Z = SparsePoly(1, {(0,): 1, (1,): -1})
F22 = SparsePoly(2, {(0, 0): 1, (1, 1): -2})


def test_basis_order_grlex_leading_variable_first():
    assert graded_monomials(2, 2) == [
        (0, 0),
        (1, 0),
        (0, 1),
        (2, 0),
        (1, 1),
        (0, 2),
    ]
    assert graded_monomials(1, 3) == [(0,), (1,), (2,), (3,)]


def test_gram_anchor_block():
    sys1 = assemble_gram(H1, ONE_MINUS_Z, SparsePoly.one(1), 1)
    assert sys1.exact
    assert sys1.basis == ((0,), (1,))
    assert [[x for x in row] for row in sys1.matrix] == [[2, -1], [-1, 2]]
    assert list(sys1.rhs) == [1, 0]
    res = optimal_approximant(sys1, method="exact")
    assert res.coefficients == (Fraction(2, 3), Fraction(1, 3))
    assert res.dist_sq == Fraction(1, 3)


def test_dist_anchors_exact():
    # degree-m best distance for 1 - z on the Hardy line is 1/(m+2)
    sys5 = assemble_gram(H1, ONE_MINUS_Z, SparsePoly.one(1), 5)
    for m in range(6):
        res = optimal_approximant(sys5, degree=m, method="exact")
        assert res.dist_sq == Fraction(1, m + 2), m
    # two-variable product target: constants already reach 2/3, degree 2
    # lands exactly on 8/15
    sys22 = assemble_gram(DA2, F22, SparsePoly.one(2), 2)
    assert optimal_approximant(sys22, degree=0, method="exact").dist_sq == Fraction(2, 3)
    assert optimal_approximant(sys22, method="exact").dist_sq == Fraction(8, 15)


def _projection_oracle(space, f, g, m):
    """Distance via explicit Gram-Schmidt on {z^beta f}, no normal equations."""
    basis = [SparsePoly(f.dim, {b: 1}) * f for b in graded_monomials(f.dim, m)]
    ortho: list[SparsePoly] = []
    norms: list[object] = []
    for v in basis:
        w = v
        for u, nu in zip(ortho, norms):
            coef = inner_product(space, v, u)
            if isinstance(coef, ComplexRational):
                scale = coef * ComplexRational(Fraction(1)) / ComplexRational(nu)
                w = w - u * scale
            else:
                w = w - u * (coef / nu)
        nw = norm_sq(space, w)
        if (float(nw) if not isinstance(nw, float) else nw) <= 0:
            continue
        ortho.append(w)
        norms.append(nw)
    rest = norm_sq(space, g)
    for u, nu in zip(ortho, norms):
        c = inner_product(space, g, u)
        c2 = c.abs2() if isinstance(c, ComplexRational) else abs(c) ** 2
        if isinstance(rest, Fraction) and isinstance(c2, Fraction) and isinstance(nu, Fraction):
            rest = rest - c2 / nu
        else:
            rest = float(rest) - float(c2) / float(nu)
    return rest


def test_projection_oracle_random_systems():
    # normal equations and raw Gram-Schmidt agree: exactly on the Fraction
    # path, to 1e-10 relatively on the float path
    rng = random.Random(20260819)
    spaces = [
        H1,
        DA2,
        SpaceSpec.drury_arveson(3),
        SpaceSpec.alpha_scale(2, 2),
        SpaceSpec.alpha_scale(2, -1),
    ]
    checked = 0
    for trial in range(200):
        space = spaces[trial % len(spaces)]
        d = space.d
        m = rng.choice([1, 2] if d >= 3 else [1, 2, 3])

        def rand_poly():
            terms = {}
            for _ in range(rng.randint(1, 3)):
                beta = tuple(rng.randint(0, 2) for _ in range(d))
                terms[beta] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            return SparsePoly(d, terms)

        f = rand_poly()
        if not f.terms:
            continue
        g = rand_poly()
        oracle = _projection_oracle(space, f, g, m)
        res = optimal_approximant(assemble_gram(space, f, g, m), method="exact")
        assert res.exact
        assert res.dist_sq == oracle, (space.describe(), f.terms, g.terms, m)
        resf = optimal_approximant(
            assemble_gram(space, f, g, m, force_float=True), method="float"
        )
        scale = max(1.0, abs(float(oracle)))
        assert abs(resf.dist_sq - float(oracle)) <= 1e-10 * scale
        checked += 1
    assert checked >= 150


def test_dist_monotone_in_degree():
    pts = distance_profile(DA2, F22, SparsePoly.one(2), range(0, 9), method="exact")
    vals = [p.dist_sq for p in pts]
    assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))
    # plateau structure: odd cutoffs add nothing for this target
    assert vals[0] == pytest.approx(vals[1])
    assert vals[2] == pytest.approx(vals[3])
    assert vals[1] > vals[2]


def test_profile_scaling_invariance():
    f2 = F22 * ComplexRational(Fraction(2))
    a = distance_profile(DA2, F22, SparsePoly.one(2), [0, 2, 4], method="exact")
    b = distance_profile(DA2, f2, SparsePoly.one(2), [0, 2, 4], method="exact")
    for pa, pb in zip(a, b):
        assert pa.dist_sq == pytest.approx(pb.dist_sq, rel=1e-14)


def test_cyclicity_profile_known_values():
    pts = cyclicity_profile(DA2, F22, [0, 2, 4], method="exact")
    assert pts[0].dist_sq == pytest.approx(2.0 / 3.0)
    assert pts[1].dist_sq == pytest.approx(8.0 / 15.0)
    assert pts[2].dist_sq == pytest.approx(16.0 / 35.0)
    for p in pts:
        assert p.min_pivot > 0
        assert p.path == "exact"


def test_residual_identity():
    sysm = assemble_gram(DA2, F22, SparsePoly.one(2), 4)
    res = optimal_approximant(sysm, method="exact")
    p = SparsePoly(2, dict(zip(res.basis, res.coefficients)))
    resid = SparsePoly.one(2) - p * F22
    assert norm_sq(DA2, resid) == res.dist_sq


def test_membership_orthogonal_case():
    # h orthogonal to every multiple of f: distance stays at ||h||^2
    sp = SpaceSpec.drury_arveson(2)
    f = SparsePoly(2, {(1, 0): 1})
    h = SparsePoly(2, {(0, 1): 1})
    pts = membership_profile(sp, h, f, 1, [0, 1, 2, 3])
    hn = float(norm_sq(sp, h))
    for p in pts:
        assert p.dist_sq == pytest.approx(hn, rel=1e-12)


def test_membership_contained_case():
    # h = f * q is reached once the cutoff covers deg q
    sp = H1
    f = ONE_MINUS_Z
    q = SparsePoly(1, {(0,): 1, (2,): Fraction(1, 3)})
    h = f * q
    pts = membership_profile(sp, h, f, 1, [0, 1, 2, 3])
    assert pts[-1].dist_sq <= 1e-14
    vals = [p.dist_sq for p in pts]
    assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))


def test_hc_profile_matches_shifted_distance():
    # the n-th profile equals a plain distance profile with weight shift
    pts = hc_profile(SpaceSpec.alpha_scale(1, 4), ONE_MINUS_Z, 1, [0, 4, 8])
    assert all(p.dist_sq > 0 for p in pts)
    vals = [p.dist_sq for p in pts]
    assert vals == sorted(vals, reverse=True)


def test_finite_section_anchor_values():
    assert finite_section_mult_bound(H1, SparsePoly(1, {(1,): 1}), 6) == pytest.approx(1.0)
    c = SparsePoly(1, {(0,): Fraction(-7, 2)})
    assert finite_section_mult_bound(H1, c, 4) == pytest.approx(3.5)
    # coordinate shift is a contraction on the two-variable space
    z1 = SparsePoly(2, {(1, 0): 1})
    b = finite_section_mult_bound(DA2, z1, 6)
    assert b <= 1.0 + 1e-12
    bounds = [finite_section_mult_bound(H1, ONE_MINUS_Z, m) for m in (2, 4, 6, 8)]
    assert all(x <= y + 1e-12 for x, y in zip(bounds, bounds[1:]))
    assert all(x <= 2.0 + 1e-9 for x in bounds)


def test_ratio_sweep_against_series_oracle():
    # p = 1 - z = (1-z), s = 1: h_r has coefficients 1, r-2, then
    # r^(n-2) (1-r)^2; sum the Besov weights directly
    sp = SpaceSpec.besov(3, 1, PointMassAtOne())
    p = SparsePoly(3, {(0, 0, 0): 1, (1, 0, 0): -1})

    def oracle(r, M):
        def w(n):
            if n == 0:
                return 1.0
            return 2.0 * n * n / ((n + 1) * (n + 2))

        total = w(0) * 1.0 + w(1) * (r - 2.0) ** 2
        for n in range(2, M + 1):
            total += w(n) * (r ** (n - 2) * (1.0 - r) ** 2) ** 2
        return total

    res = ratio_norm_sweep(sp, p, 1, 1, [0.9, 0.99], [64, 256, 1024])
    for row in res.rows:
        if row.accepted:
            assert row.norm_sq == pytest.approx(oracle(row.r, row.M), rel=1e-9)
    assert res.sup_norm_sq == pytest.approx(1.4039405116204102, rel=1e-6)
    assert res.tail_threshold == 1e-8
    accepted_rs = {row.r for row in res.rows if row.accepted}
    assert accepted_rs == {0.9, 0.99}


def test_gram_rejects_zero_f():
    with pytest.raises(ValueError):
        assemble_gram(H1, SparsePoly(1, {}), SparsePoly.one(1), 2)


def test_lower_degree_slice_reuses_system():
    sysm = assemble_gram(H1, ONE_MINUS_Z, SparsePoly.one(1), 6)
    full = optimal_approximant(sysm, method="exact")
    part = optimal_approximant(sysm, degree=3, method="exact")
    assert part.degree == 3
    assert len(part.basis) == 4
    assert part.dist_sq > full.dist_sq


def test_mpmath_retry_on_brutal_conditioning():
    # heavy negative weights make the float Cholesky pivot collapse; the
    # mpmath retry must still return a nonnegative distance
    sp = SpaceSpec.alpha_scale(1, -24)
    sysm = assemble_gram(sp, ONE_MINUS_Z, SparsePoly.one(1), 12, force_float=True)
    res = optimal_approximant(sysm, method="auto")
    assert res.dist_sq >= 0.0
    exact = optimal_approximant(
        assemble_gram(sp, ONE_MINUS_Z, SparsePoly.one(1), 12), method="exact"
    )
    assert res.dist_sq == pytest.approx(float(exact.dist_sq), rel=1e-6)


if HAVE_HYPOTHESIS:

    @given(
        st.lists(
            st.fractions(min_value=-3, max_value=3, max_denominator=4),
            min_size=1,
            max_size=4,
        ),
        st.integers(min_value=0, max_value=4),
    )
    @settings(max_examples=40, deadline=None)
    def test_dist_sq_between_zero_and_g_norm(coeffs, m):
        f = SparsePoly(1, {(i,): c for i, c in enumerate(coeffs) if c != 0})
        if not f.terms:
            return
        res = optimal_approximant(
            assemble_gram(H1, f, SparsePoly.one(1), m), method="exact"
        )
        assert 0 <= res.dist_sq <= 1
