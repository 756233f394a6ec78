"""Embeddings of one-variable function spaces into ball spaces.

Two substitution operators carry one-variable polynomials into d variables:

* ``tau_compose``: lambda -> k^(k/2) z_1 ... z_k, so lambda^n maps to
  k^(nk/2) (z_1...z_k)^n.  The image of the disc space D_{(k-1)/2} sits in
  the Drury-Arveson space of the ball with two-sided norm bounds.
* ``sum_squares_compose``: lambda -> z_1^2 + ... + z_k^2.  The squared
  Drury-Arveson norm of the image of lambda^n is the combinatorial
  coefficient ``sk_coefficient(k, n)``, which grows like (n+1)^((k-1)/2).

``projection_lift`` zero-pads exponents; it is an isometry degree by degree
because the monomial norm beta!/|beta|! ignores appended zeros.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .poly import Series1D, SparsePoly, series_from_poly
from .scalars import ComplexRational, to_complex


def _as_series(f) -> Series1D:
    if isinstance(f, Series1D):
        return f
    if isinstance(f, SparsePoly):
        return series_from_poly(f)
    raise TypeError("expected a 1-variable polynomial or series")


def _tau_scale(k: int, n: int):
    """k^(nk/2) as an exact int when it is one, else a float."""
    e2 = n * k  # square of the scale is k^(nk)
    if e2 % 2 == 0:
        return k ** (e2 // 2)
    root = math.isqrt(k)
    if root * root == k:
        return root ** e2
    return float(k) ** (e2 / 2)

def tau_scale_sq(k: int, n: int) -> int:
    """Exact square k^(nk) of the degree-n scale factor."""
    return k ** (n * k)


def tau_compose(f, k: int, d: int) -> SparsePoly:
    """Compose a 1-variable polynomial with k^(1/2+...) z_1...z_k inside C^d.

    lambda^n -> k^(nk/2) (z_1...z_k)^n.  Coefficients stay exact whenever
    every needed scale k^(nk/2) is an integer (always for even k, and for
    perfect-square k); otherwise the image is on the float path and exact
    norm accounting goes through ``tau_scale_sq``/``tkd_monomial_norm_sq``.
    """
    if k < 1 or d < k:
        raise ValueError("need 1 <= k <= d")
    s = _as_series(f)
    terms = {}
    for n, a in enumerate(s.coeffs):
        if isinstance(a, ComplexRational) and not a:
            continue
        if not isinstance(a, ComplexRational) and a == 0:
            continue
        scale = _tau_scale(k, n)
        beta = tuple([n] * k + [0] * (d - k))
        terms[beta] = a * scale if not isinstance(scale, float) else to_complex(a) * scale
    return SparsePoly(d, terms)


@lru_cache(maxsize=None)
def tkd_monomial_norm_sq(k: int, n: int) -> Fraction:
    """Exact ||tau image of lambda^n||^2 in the Drury-Arveson space:
    k^(nk) (n!)^k / (nk)! (independent of the ambient d >= k)."""
    return Fraction(tau_scale_sq(k, n) * math.factorial(n) ** k, math.factorial(n * k))


def tkd_norm_ratios(k: int, max_degree: int) -> list[float]:
    """||tau(lambda^n)||^2_{H2} / ||lambda^n||^2_{D_{(k-1)/2}} for n <= max_degree.

    Bounded above and below by positive constants; the window certifies the
    two-sided embedding bound degree by degree.
    """
    out = []
    for n in range(max_degree + 1):
        num = tkd_monomial_norm_sq(k, n)
        den = float(n + 1) ** ((k - 1) / 2)
        out.append(float(num) / den)
    return out


def sum_squares_compose(f, k: int, d: int) -> SparsePoly:
    """Compose a 1-variable polynomial with z_1^2 + ... + z_k^2 inside C^d (exact)."""
    if k < 1 or d < k:
        raise ValueError("need 1 <= k <= d")
    s = _as_series(f)
    base = SparsePoly(d, {tuple(2 if i == j else 0 for i in range(d)): 1 for j in range(k)})
    # Horner in the substitution variable
    acc = SparsePoly.zero(d)
    for a in reversed(s.coeffs):
        acc = acc * base + a
    return acc


@lru_cache(maxsize=None)
def _central_binomial(j: int) -> int:
    return math.comb(2 * j, j)


@lru_cache(maxsize=None)
def _sum_sq_term_sum(d: int, n: int) -> int:
    """sum over |alpha| = n, alpha in N_0^d, of (2 alpha)!/(alpha!)^2.

    Convolution recursion in d: splitting off the last exponent turns the
    d-variable sum into a convolution of the (d-1)-variable sums with the
    central binomial coefficients; cost O(d n^2) against O(n^(d-1)) for
    direct enumeration.
    """
    if d == 1:
        return _central_binomial(n)
    return sum(_sum_sq_term_sum(d - 1, j) * _central_binomial(n - j) for j in range(n + 1))


def sk_coefficient(d: int, n: int) -> Fraction:
    """Exact squared Drury-Arveson norm of the image of lambda^n under the
    sum-of-squares substitution with k = d slots: (n!)^2/(2n)! * sum_{|alpha|=n} (2 alpha)!/(alpha!)^2."""
    if d < 1 or n < 0:
        raise ValueError("need d >= 1, n >= 0")
    return Fraction(_sum_sq_term_sum(d, n), _central_binomial(n))


def sk_coefficient_ratios(d: int, max_degree: int) -> list[float]:
    """sk_coefficient(d, n) / (n+1)^((d-1)/2); bounded above and below."""
    return [float(sk_coefficient(d, n)) / float(n + 1) ** ((d - 1) / 2) for n in range(max_degree + 1)]


def projection_lift(f: SparsePoly, d: int) -> SparsePoly:
    """Lift a polynomial in fewer variables by zero-padding exponents (isometric)."""
    if d < f.dim:
        raise ValueError("target dimension must be >= the source dimension")
    pad = (0,) * (d - f.dim)
    return SparsePoly(d, {b + pad: c for b, c in f.terms.items()})


def diagonal_projection(q: SparsePoly, k: int) -> SparsePoly:
    """Keep the terms whose exponent is (n, ..., n, 0, ..., 0) with k equal slots.

    These are exactly the monomials in the range of ``tau_compose``; the kept
    and dropped parts stay orthogonal after multiplication by any diagonal
    image, which is what makes one-variable distance computations transfer.
    """
    if k < 1 or k > q.dim:
        raise ValueError("need 1 <= k <= dim")
    keep = {}
    for b, c in q.terms.items():
        head, tail = b[:k], b[k:]
        if len(set(head)) == 1 and all(e == 0 for e in tail):
            keep[b] = c
    return SparsePoly(q.dim, keep)
