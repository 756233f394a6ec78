"""Radially weighted Besov spaces on the unit ball and the D_alpha scale.

A radial measure omega = mu x sigma on the closed ball (mu on [0,1],
sigma the normalized surface measure) induces, for an order-N space, the
weight sequence

    W_0 = mu([0,1])                      (total mass, point mass included)
    W_n = n^(2N) * omega_n,   n >= 1,

where omega_n = (n! (d-1)! / (n+d-1)!) * integral of r^(2n) dmu(r).
The squared norm of a monomial z^beta is then W_{|beta|} * beta!/|beta|!,
and monomials are pairwise orthogonal.

The D_alpha scale uses W_n = (n+1)^alpha directly: alpha = 0 is the
d-variable Drury-Arveson space, alpha = -(d-1) is norm-equal to the Hardy
space of the sphere only when d = 1 or d = 2 (it is norm-equivalent in
general, which is why the exact sphere norm has its own function here).

Admissibility requires mu((r,1]) > 0 for every r < 1; the named measures
satisfy it structurally, quadrature measures are checked at construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .poly import SparsePoly, factorial_ratio
from .scalars import abs_sq, conj, to_complex

# -- radial measures ---------------------------------------------------------


@dataclass(frozen=True)
class PointMassAtOne:
    """mu = delta_1; the order-0 space is the Hardy space of the sphere."""

    def moment(self, n: int) -> Fraction:
        return Fraction(1)

    @property
    def is_exact(self) -> bool:
        return True

    def to_json(self):
        return {"type": "point_mass_one"}


@dataclass(frozen=True)
class NormalizedVolume:
    """Radial part of normalized Lebesgue measure on the ball in C^dim."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    def moment(self, n: int) -> Fraction:
        # V(rB) = r^(2 dim)  =>  dmu = 2 dim r^(2 dim - 1) dr
        return Fraction(self.dim, n + self.dim)

    @property
    def is_exact(self) -> bool:
        return True

    def to_json(self):
        return {"type": "volume", "dim": self.dim}


@dataclass(frozen=True)
class ConstantDensity:
    """dmu = c * 2r dr on [0,1]."""

    c: Fraction = Fraction(1)

    def moment(self, n: int) -> Fraction:
        return Fraction(self.c) / (n + 1)

    @property
    def is_exact(self) -> bool:
        return True

    def to_json(self):
        return {"type": "constant_density", "c": [Fraction(self.c).numerator, Fraction(self.c).denominator]}


@dataclass(frozen=True)
class BetaDensity:
    """dmu = (1-r)^beta * 2r dr on [0,1], integer beta >= 0."""

    beta: int

    def __post_init__(self):
        if not isinstance(self.beta, int) or self.beta < 0:
            raise ValueError("beta must be an integer >= 0")

    def moment(self, n: int) -> Fraction:
        # 2 * B(2n+2, beta+1), exact
        return Fraction(2 * math.factorial(2 * n + 1) * math.factorial(self.beta), math.factorial(2 * n + 2 + self.beta))

    @property
    def is_exact(self) -> bool:
        return True

    def to_json(self):
        return {"type": "beta_density", "beta": self.beta}


class GeneralQuadrature:
    """Radial measure given by quadrature nodes/weights on [0,1] (float path).

    Admissibility demands mass near r = 1; construction rejects rules whose
    largest positively weighted node sits below 0.99.
    """

    __slots__ = ("nodes", "weights")

    def __init__(self, nodes, weights):
        nodes = np.asarray(nodes, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size == 0:
            raise ValueError("nodes and weights must be matching 1-d arrays")
        if nodes.min() < 0 or nodes.max() > 1:
            raise ValueError("nodes must lie in [0,1]")
        if np.any(weights < 0):
            raise ValueError("weights must be non-negative")
        if nodes[weights > 0].max() < 0.99:
            raise ValueError("measure has no mass near r = 1 (inadmissible)")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @staticmethod
    def from_density(u, n_nodes: int = 256):
        """Gauss-Legendre rule for dmu = u(r) * 2r dr on [0,1]."""
        x, w = np.polynomial.legendre.leggauss(n_nodes)
        r = 0.5 * (x + 1.0)
        wr = 0.5 * w * np.array([float(u(ri)) for ri in r]) * 2.0 * r
        return GeneralQuadrature(r, wr)

    def moment(self, n: int) -> float:
        return float(np.dot(self.weights, self.nodes ** (2 * n)))

    @property
    def is_exact(self) -> bool:
        return False

    def __eq__(self, other):
        if not isinstance(other, GeneralQuadrature):
            return NotImplemented
        return np.array_equal(self.nodes, other.nodes) and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.nodes.tobytes(), self.weights.tobytes()))

    def to_json(self):
        return {"type": "quadrature", "nodes": self.nodes.tolist(), "weights": self.weights.tolist()}


def measure_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("type")
    if kind == "point_mass_one":
        return PointMassAtOne()
    if kind == "volume":
        return NormalizedVolume(int(obj["dim"]))
    if kind == "constant_density":
        c = obj.get("c", [1, 1])
        return ConstantDensity(Fraction(int(c[0]), int(c[1])))
    if kind == "beta_density":
        return BetaDensity(int(obj["beta"]))
    if kind == "quadrature":
        return GeneralQuadrature(obj["nodes"], obj["weights"])
    raise ValueError(f"unknown measure type: {kind!r}")


def moment(measure, n: int):
    """integral of r^(2n) dmu(r); exact Fraction for the named measures."""
    return measure.moment(n)


def measure_mass(measure):
    return measure.moment(0)


# -- space specifications ----------------------------------------------------


@dataclass(frozen=True)
class SpaceSpec:
    """Either an order-N Besov space over a radial measure or a D_alpha space."""

    d: int
    kind: str
    N: int | None = None
    measure: object | None = None
    alpha: object | None = None  # int/Fraction (exact) or float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.kind == "besov":
            if self.N is None or self.N < 0 or not isinstance(self.N, int):
                raise ValueError("besov spaces need an integer order N >= 0")
            if self.measure is None:
                raise ValueError("besov spaces need a radial measure")
        elif self.kind == "alpha":
            if self.alpha is None:
                raise ValueError("alpha-scale spaces need alpha")
        else:
            raise ValueError(f"unknown space kind: {self.kind!r}")

    # named constructors

    @staticmethod
    def drury_arveson(d: int) -> "SpaceSpec":
        return SpaceSpec(d=d, kind="alpha", alpha=0)

    @staticmethod
    def alpha_scale(d: int, alpha) -> "SpaceSpec":
        return SpaceSpec(d=d, kind="alpha", alpha=alpha)

    @staticmethod
    def besov(d: int, N: int, measure) -> "SpaceSpec":
        return SpaceSpec(d=d, kind="besov", N=N, measure=measure)

    @property
    def is_exact(self) -> bool:
        if self.kind == "besov":
            return self.measure.is_exact
        return isinstance(self.alpha, int) or isinstance(self.alpha, Fraction) and self.alpha.denominator == 1

    def weight(self, n: int):
        """W_n; Fraction on the exact path, float otherwise."""
        return _weight(self, n)

    def to_json(self):
        out = {"d": self.d, "kind": self.kind}
        if self.kind == "besov":
            out["N"] = self.N
            out["measure"] = self.measure.to_json()
        else:
            a = self.alpha
            out["alpha"] = int(a) if isinstance(a, (int, Fraction)) and Fraction(a).denominator == 1 else float(a)
        return out

    def describe(self) -> str:
        if self.kind == "alpha":
            return f"D_{self.alpha}(B_{self.d})"
        return f"B^{self.N}_omega(B_{self.d}), omega = {self.measure.to_json()['type']}"


def space_from_json(obj) -> SpaceSpec:
    if isinstance(obj, str):
        obj = json.loads(obj)
    d = int(obj["d"])
    kind = obj["kind"]
    if kind == "besov":
        return SpaceSpec(d=d, kind="besov", N=int(obj["N"]), measure=measure_from_json(obj["measure"]))
    if kind == "alpha":
        a = obj["alpha"]
        a = int(a) if float(a).is_integer() else float(a)
        return SpaceSpec(d=d, kind="alpha", alpha=a)
    raise ValueError(f"unknown space kind: {kind!r}")


@lru_cache(maxsize=None)
def _sphere_factor(d: int, n: int) -> Fraction:
    """n!(d-1)!/(n+d-1)! — the Hardy-sphere/Drury-Arveson norm ratio in degree n."""
    return Fraction(math.factorial(n) * math.factorial(d - 1), math.factorial(n + d - 1))


@lru_cache(maxsize=None)
def _weight(space: SpaceSpec, n: int):
    if n < 0:
        raise ValueError("n must be >= 0")
    if space.kind == "alpha":
        a = space.alpha
        if isinstance(a, int):
            return Fraction(n + 1) ** a
        if isinstance(a, Fraction) and a.denominator == 1:
            return Fraction(n + 1) ** int(a)
        return float(n + 1) ** float(a)
    if n == 0:
        return measure_mass(space.measure)
    omega_n = _sphere_factor(space.d, n) * space.measure.moment(n)
    return n ** (2 * space.N) * omega_n


# -- norms and inner products -------------------------------------------------


def monomial_norm_sq(space: SpaceSpec, beta):
    """||z^beta||^2 = W_{|beta|} * beta!/|beta|!"""
    beta = tuple(beta)
    if len(beta) != space.d:
        raise ValueError("exponent length must equal the space dimension")
    return space.weight(sum(beta)) * factorial_ratio(beta)


def inner_product(space: SpaceSpec, f: SparsePoly, g: SparsePoly):
    """<f, g> with monomials orthogonal; exact iff space and inputs are exact."""
    if f.dim != space.d or g.dim != space.d:
        raise ValueError("polynomial dimension must equal the space dimension")
    exact = space.is_exact and f.is_exact() and g.is_exact()
    total = Fraction(0) if exact else 0j
    for beta, c in f.terms.items():
        cg = g.terms.get(beta)
        if cg is None:
            continue
        w = monomial_norm_sq(space, beta)
        if exact:
            total = total + (c * conj(cg)) * w
        else:
            total = total + to_complex(c) * to_complex(cg).conjugate() * float(w)
    return total


def norm_sq(space: SpaceSpec, f: SparsePoly):
    exact = space.is_exact and f.is_exact()
    total = Fraction(0) if exact else 0.0
    for beta, c in f.terms.items():
        w = monomial_norm_sq(space, beta)
        total = total + abs_sq(c) * (w if exact else float(w))
    return total


def hardy_sphere_norm_sq(f: SparsePoly):
    """Exact squared Hardy-space-of-the-sphere norm of a polynomial.

    In degree n the sphere square equals n!(d-1)!/(n+d-1)! times the
    Drury-Arveson square; for a monomial that is (d-1)! beta! / (|beta|+d-1)!.
    Only homogeneous input is accepted, matching the per-degree role the
    factor plays in the weight sequence.
    """
    if not f.is_homogeneous():
        raise ValueError("hardy_sphere_norm_sq needs a homogeneous polynomial")
    exact = f.is_exact()
    total = Fraction(0) if exact else 0.0
    for beta, c in f.terms.items():
        w = _sphere_factor(f.dim, sum(beta)) * factorial_ratio(beta)
        total = total + abs_sq(c) * (w if exact else float(w))
    return total


def homogeneous_norms_sq(space: SpaceSpec, f: SparsePoly):
    """dict degree -> squared norm of the homogeneous component."""
    return {n: norm_sq(space, part) for n, part in f.homogeneous_parts().items()}


def besov_da_ratio(d: int, max_degree: int) -> list[Fraction]:
    """Exact weight ratios, degree by degree, between the order-(d-1)/2 Besov
    space over the sphere measure and the Drury-Arveson space (odd d).

    For d = 3 the closed form is 2 n^2 / ((n+1)(n+2)), which stays inside
    [1/3, 2]; two-sided bounds like these realize the Drury-Arveson space
    as a radially weighted Besov space.
    """
    if d < 1 or d % 2 == 0:
        raise ValueError("besov_da_ratio needs odd d")
    N = (d - 1) // 2
    space = SpaceSpec.besov(d, N, PointMassAtOne())
    out = []
    for n in range(max_degree + 1):
        w = space.weight(n)
        out.append(Fraction(w))
    return out


def dilation_contraction_gap(spaceN: SpaceSpec, f: SparsePoly, r):
    """(1-r)^2 ||f||_N^2 - ||f - f_r||_{N-1}^2 for the order-(N-1) space
    over the same measure; the gap is >= 0 (exact on the exact path)."""
    if spaceN.kind != "besov" or spaceN.N < 1:
        raise ValueError("needs an order-N besov space with N >= 1")
    lower = SpaceSpec.besov(spaceN.d, spaceN.N - 1, spaceN.measure)
    fr = f.dilate(r)
    lhs = norm_sq(lower, f - fr)
    rhs = norm_sq(spaceN, f)
    one = Fraction(1) if spaceN.is_exact and f.is_exact() and not isinstance(r, float) else 1.0
    return (one - r) * (one - r) * rhs - lhs


def slice_norm_gap(f: SparsePoly, z) -> float:
    """||f||^2_{H2_d} - sum_n |f_n(z)|^2 for |z| = 1; non-negative by
    Cauchy-Schwarz against the degree-n kernel component."""
    s = f.slice(z, max(0, f.degree()))
    total = math.fsum(abs(to_complex(a)) ** 2 for a in s.coeffs)
    da = SpaceSpec.drury_arveson(f.dim)
    return float(norm_sq(da, f.to_float())) - total
