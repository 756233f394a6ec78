"""Lower-bound certificates for approximation distances.

Two certificate routes, both producing a ``Certificate`` with an audit
trail:

* dual functionals: on the one-variable D_alpha scale the functional
  L_j(g) = g^(j)(1) is bounded exactly when alpha > 2j+1, with
  ||L_j||^2 = sum_{n>=j} (n!/(n-j)!)^2 / (n+1)^alpha.  L_j kills every
  polynomial multiple of an h vanishing to order j+1 at 1, so
  |L_j(g)| / ||L_j|| bounds dist(g, {p h}) from below at every degree.
* Riesz-type energies: a measure mu on the zero set of f inside the unit
  sphere pairs as <p f, f_mu> = 0 against its Cauchy-type transform f_mu,
  and ||f_mu||^2 <= E(mu) = integral of 1/|1 - <z,w>|.  Finite energy
  (an embedded cube of dimension >= 3 suffices) therefore gives
  dist(1, {p f}) >= mu_total / sqrt(E).

The energy upper bound chains |1 - <z,w>| >= |z - w|^2 / 2 >= (c^2/2)|t-s|^2
over a reverse-Lipschitz parametrization, giving E <= (2/c^2) * the
parameter-box integral of |t-s|^(-2); c is estimated as a grid minimum and
recorded as such in the audit, together with the looser 2/c variant of the
constant for comparison.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .poly import SparsePoly, series_from_poly
from .scalars import ComplexRational, abs_sq, to_complex
from .spaces import SpaceSpec

SPHERE_TOL = 1e-12
SUPPORT_TOL = 1e-10
ENERGY_DOUBLING_TOL = 0.02


# -- derivative functionals on the D_alpha scale ------------------------------


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


@lru_cache(maxsize=None)
def _falling_sq_in_shifted_basis(j: int) -> tuple:
    """Coefficients q_i with (n(n-1)...(n-j+1))^2 = sum_i q_i (n+1)^i."""
    poly = [Fraction(1)]
    for i in range(j):
        poly = _poly_mul(poly, [Fraction(-(i + 1)), Fraction(1)])  # (x - (i+1)) with x = n+1
    return tuple(_poly_mul(poly, poly))


@dataclass(frozen=True)
class NormBracket:
    """Certified bracket for a squared functional norm."""

    lower: float
    upper: float
    cutoff: int

    @property
    def norm_lower(self) -> float:
        return math.sqrt(self.lower)

    @property
    def norm_upper(self) -> float:
        return math.sqrt(self.upper)

    @property
    def rel_width(self) -> float:
        return (self.upper - self.lower) / self.lower if self.lower > 0 else math.inf


def functional_norm(j: int, alpha, rel_tol: float = 1e-8) -> NormBracket:
    """Bracket ||L_j||^2 = sum_{n>=j} (n!/(n-j)!)^2 (n+1)^(-alpha).

    Finite iff alpha > 2j + 1 (ValueError otherwise).  A partial sum to an
    adaptive cutoff plus signed integral bounds on the tail brackets the
    value; the bracket narrows like cutoff^(2j - alpha) and the cutoff grows
    until the relative width drops under rel_tol.
    """
    alpha = float(alpha)
    if alpha <= 2 * j + 1:
        raise ValueError(f"functional of order {j} is unbounded for alpha = {alpha}")
    q = _falling_sq_in_shifted_basis(j)

    def tail_bracket(M: int):
        lo = 0.0
        up = 0.0
        for i, qi in enumerate(q):
            s = alpha - i
            qi = float(qi)
            if qi == 0.0:
                continue
            t_lo = M ** (1.0 - s) / (s - 1.0)
            t_up = M ** (-s) + t_lo
            if qi > 0:
                lo += qi * t_lo
                up += qi * t_up
            else:
                lo += qi * t_up
                up += qi * t_lo
        return max(lo, 0.0), max(up, 0.0)

    K = 1 << 14
    while True:
        ns = np.arange(j, K + 1, dtype=float)
        terms = np.ones_like(ns)
        for i in range(j):
            terms *= ns - i
        terms = terms**2 / (ns + 1.0) ** alpha
        partial = float(math.fsum(terms.tolist()))
        t_lo, t_up = tail_bracket(K + 2)
        # fsum is exact to ~1 ulp but not directionally rounded; pad the
        # bracket by a few ulps so it stays a true enclosure
        guard = 1e-13
        lower = (partial + t_lo) * (1.0 - guard)
        upper = (partial + t_up) * (1.0 + guard)
        if upper - lower <= rel_tol * lower or K >= (1 << 24):
            return NormBracket(lower=lower, upper=upper, cutoff=K)
        K <<= 1


@dataclass(frozen=True)
class DerivativeFunctional:
    """g -> g^(j)(1) on the one-variable D_alpha space."""

    j: int
    alpha: object

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("j must be >= 0")
        if float(self.alpha) <= 2 * self.j + 1:
            raise ValueError(f"order-{self.j} boundary derivative is unbounded for alpha = {self.alpha}")

    def norm_sq_bracket(self, rel_tol: float = 1e-8) -> NormBracket:
        return functional_norm(self.j, self.alpha, rel_tol=rel_tol)

    def apply(self, g: SparsePoly):
        """g^(j)(1); exact on the exact path."""
        s = series_from_poly(g)
        exact = g.is_exact()
        total = ComplexRational() if exact else 0j
        for n, a in enumerate(s.coeffs):
            if n < self.j:
                continue
            w = math.factorial(n) // math.factorial(n - self.j)
            total = total + a * w
        return total


# -- certificates -------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    kind: str  # "dual" | "energy"
    lower_bound: float
    audit: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind, "lower_bound": self.lower_bound, "audit": self.audit, "grid": self.grid}

    @staticmethod
    def from_json(obj) -> "Certificate":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return Certificate(kind=obj["kind"], lower_bound=float(obj["lower_bound"]),
                           audit=obj.get("audit", {}), grid=obj.get("grid", {}))


def _derivatives_at_one(h: SparsePoly, up_to: int):
    """[h(1), h'(1), ..., h^(up_to)(1)], exact when h is exact."""
    s = series_from_poly(h)
    vals = []
    for i in range(up_to + 1):
        total = ComplexRational() if h.is_exact() else 0j
        for n, a in enumerate(s.coeffs):
            if n < i:
                continue
            total = total + a * (math.factorial(n) // math.factorial(n - i))
        vals.append(total)
    return vals


def dual_lower_bound(space: SpaceSpec, g: SparsePoly, h: SparsePoly, j: int) -> Certificate:
    """Certificate: dist(g, {p h : p polynomial}) >= |g^(j)(1)| / ||L_j||.

    Requires a one-variable alpha-scale space with alpha > 2j+1, an h
    vanishing to order >= j+1 at 1 (so L_j annihilates every p h), and
    L_j(g) != 0.  The bound divides by the upper bracket of the norm, and
    holds for every truncation degree at once.
    """
    if space.kind != "alpha" or space.d != 1:
        raise ValueError("dual certificates live on the one-variable alpha scale")
    if g.dim != 1 or h.dim != 1:
        raise ValueError("g and h must be one-variable polynomials")
    func = DerivativeFunctional(j, space.alpha)  # raises if unbounded

    derivs = _derivatives_at_one(h, j)
    scale = math.fsum(math.sqrt(float(abs_sq(c))) for c in h.terms.values()) or 1.0
    for i, v in enumerate(derivs):
        if isinstance(v, ComplexRational):
            ok = not v
        else:
            ok = abs(v) <= 1e-10 * scale
        if not ok:
            raise ValueError(f"h must vanish to order {j + 1} at 1; derivative {i} is {v!r}")

    Lg = func.apply(g)
    Lg_abs = math.sqrt(float(abs_sq(Lg)))
    if Lg_abs == 0:
        raise ValueError("L_j(g) = 0: the dual certificate is vacuous")
    bracket = func.norm_sq_bracket()
    lower = Lg_abs / bracket.norm_upper
    audit = {
        "j": j,
        "alpha": float(space.alpha),
        "Lg_abs": Lg_abs,
        "functional_norm_sq_bracket": [bracket.lower, bracket.upper],
        "bracket_cutoff": bracket.cutoff,
        "h_derivatives_checked": j + 1,
    }
    return Certificate(kind="dual", lower_bound=lower, audit=audit)


# -- cube measures on zero sets ------------------------------------------------


@dataclass(frozen=True)
class CubeMeasure:
    """Pushforward of Lebesgue measure on (-1,1)^m under phi into the sphere.

    phi takes an (n, m) float array of parameters to an (n, d) complex array
    of points; it must map into the unit sphere (checked on every grid to
    1e-12) and, for certificates, into the zero set of the target
    polynomial.  Named families keep an angular safety margin ("shrink")
    away from chart degeneracies so the reverse-Lipschitz constant of the
    closed cube stays positive.
    """

    m: int
    d: int
    phi: object
    label: str
    shrink: float = 0.0
    scale: float = 1.0  # density multiplier; mass and energy scale as c and c^2

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def total_mass(self) -> float:
        return self.scale * 2.0**self.m

    def scaled(self, c) -> "CubeMeasure":
        from dataclasses import replace

        return replace(self, scale=self.scale * float(c))

    @staticmethod
    def torus(k: int, d: int, shrink: float = 0.05) -> "CubeMeasure":
        """Parametrizes the sphere part of the zero set of 1 - k^(k/2) z_1...z_k:
        points k^(-1/2)(e^(i a_1), ..., e^(i a_(k-1)), e^(-i(a_1+...+a_(k-1)))).
        """
        if k < 2 or d < k:
            raise ValueError("need 2 <= k <= d")
        if not (0 < shrink < 1):
            raise ValueError("shrink must be in (0,1)")
        m = k - 1
        ang_scale = math.pi * (1.0 - shrink)
        inv_sqrt_k = 1.0 / math.sqrt(k)

        def phi(T):
            T = np.asarray(T, dtype=float)
            ang = ang_scale * T
            last = -ang.sum(axis=1, keepdims=True)
            full = np.concatenate([ang, last], axis=1)
            Z = np.zeros((T.shape[0], d), dtype=complex)
            Z[:, :k] = inv_sqrt_k * np.exp(1j * full)
            return Z

        return CubeMeasure(m=m, d=d, phi=phi, label=f"torus(k={k}, d={d})", shrink=shrink)

    @staticmethod
    def sphere_patch(k: int, d: int, shrink: float = 0.1) -> "CubeMeasure":
        """Parametrizes a patch of the real unit sphere of R^k inside the zero
        set of 1 - (z_1^2 + ... + z_k^2); m = k - 1 parameters."""
        if k < 2 or d < k:
            raise ValueError("need 2 <= k <= d")
        if not (0 < shrink < 1):
            raise ValueError("shrink must be in (0,1)")
        m = k - 1
        polar_half = (math.pi / 2.0) * (1.0 - shrink)
        azim = math.pi * (1.0 - shrink)

        def phi(T):
            T = np.asarray(T, dtype=float)
            n = T.shape[0]
            angles = np.empty((n, m), dtype=float)
            angles[:, : m - 1] = math.pi / 2.0 + polar_half * T[:, : m - 1]
            angles[:, m - 1] = azim * T[:, m - 1]
            X = np.zeros((n, d), dtype=float)
            sin_prod = np.ones(n, dtype=float)
            for i in range(m - 1):
                X[:, i] = sin_prod * np.cos(angles[:, i])
                sin_prod = sin_prod * np.sin(angles[:, i])
            X[:, m - 1] = sin_prod * np.cos(angles[:, m - 1])
            X[:, m] = sin_prod * np.sin(angles[:, m - 1])
            return X.astype(complex)

        return CubeMeasure(m=m, d=d, phi=phi, label=f"sphere_patch(k={k}, d={d})", shrink=shrink)

    @staticmethod
    def from_callable(m: int, d: int, fn, label: str = "custom") -> "CubeMeasure":
        return CubeMeasure(m=m, d=d, phi=fn, label=label)

    def grid(self, n: int, offset: float = 0.0):
        """Tensor midpoint grid with n nodes per axis, shifted by ``offset``
        cells; returns (params (n^m, m), points (n^m, d))."""
        h = 2.0 / n
        axis = -1.0 + (np.arange(n) + 0.5 + offset) * h
        mesh = np.meshgrid(*([axis] * self.m), indexing="ij")
        T = np.stack([a.ravel() for a in mesh], axis=1)
        Z = np.asarray(self.phi(T), dtype=complex)
        if Z.shape != (T.shape[0], self.d):
            raise ValueError(f"phi returned shape {Z.shape}, expected {(T.shape[0], self.d)}")
        dev = float(np.abs(np.sqrt(np.sum(np.abs(Z) ** 2, axis=1)) - 1.0).max())
        if dev > SPHERE_TOL:
            raise ValueError(f"parametrization leaves the unit sphere by {dev:.2e}")
        return T, Z


def evaluate_on_points(f: SparsePoly, Z: np.ndarray) -> np.ndarray:
    """Vectorized evaluation of f on rows of Z."""
    vals = np.zeros(Z.shape[0], dtype=complex)
    for beta, c in f.terms.items():
        term = np.full(Z.shape[0], to_complex(c), dtype=complex)
        for i, e in enumerate(beta):
            if e:
                term *= Z[:, i] ** e
        vals += term
    return vals


@dataclass(frozen=True)
class EnergyResult:
    value: float
    rel_change: float
    nodes_per_axis: int
    converged: bool
    c_estimate: float
    param_integral: float
    analytic_upper: float
    m: int
    label: str


def _param_inv_sq_integral(m: int, n: int) -> float:
    """Quadrature for the box-pair integral of |t-s|^(-2) via the difference
    substitution: integral over (-2,2)^m of prod_j (2-|u_j|) / |u|^2."""
    h = 4.0 / n
    axis = -2.0 + (np.arange(n) + 0.5) * h
    mesh = np.meshgrid(*([axis] * m), indexing="ij")
    U = np.stack([a.ravel() for a in mesh], axis=1)
    dens = np.prod(2.0 - np.abs(U), axis=1)
    r2 = np.sum(U**2, axis=1)
    return float(np.sum(dens / r2) * h**m)


def param_inv_sq_integral(m: int, n_base: int = 64, rel_tol: float = ENERGY_DOUBLING_TOL):
    """(value, rel_change, n_final) for the parameter-box integral, with
    midpoint-grid doubling until the change falls under rel_tol."""
    n = n_base
    prev = _param_inv_sq_integral(m, n)
    while True:
        n *= 2
        cur = _param_inv_sq_integral(m, n)
        rel = abs(cur - prev) / cur
        if rel < rel_tol or n >= 512:
            return cur, rel, n
        prev = cur


def energy(measure: CubeMeasure, n_base: int = 8, max_doublings: int = 2,
           rel_tol: float = ENERGY_DOUBLING_TOL) -> EnergyResult:
    """Quadrature value and analytic upper bound for E(mu).

    Convergence of the box-pair integral needs m >= 3 (ValueError below
    that).  The two grid copies are midpoint grids offset by half a cell,
    so the singular diagonal t = s is never sampled; the node count doubles
    until the energy moves by less than rel_tol.
    """
    if measure.m < 3:
        raise ValueError(f"energy requires a cube of dimension >= 3, got m = {measure.m}")
    n = n_base
    mass_sq = measure.scale**2
    T1, Z1 = measure.grid(n, offset=0.0)
    T2, Z2 = measure.grid(n, offset=0.5)
    w = (2.0 / n) ** measure.m
    prev = kernels.energy_pair_sum(Z1, Z2) * w * w * mass_sq
    rel = math.inf
    converged = False
    for _ in range(max_doublings):
        n *= 2
        T1, Z1 = measure.grid(n, offset=0.0)
        T2, Z2 = measure.grid(n, offset=0.5)
        w = (2.0 / n) ** measure.m
        cur = kernels.energy_pair_sum(Z1, Z2) * w * w * mass_sq
        rel = abs(cur - prev) / cur
        prev = cur
        if rel < rel_tol:
            converged = True
            break
    value = prev

    # reverse-Lipschitz estimate on a moderate offset grid
    nc = min(n, 12)
    Tc1, Zc1 = measure.grid(nc, offset=0.0)
    Tc2, Zc2 = measure.grid(nc, offset=0.5)
    c_est = kernels.min_chord_ratio(Zc1, Zc2, Tc1, Tc2)
    integral, _, _ = param_inv_sq_integral(measure.m)
    analytic_upper = (2.0 / c_est**2) * integral * mass_sq
    return EnergyResult(
        value=value, rel_change=rel, nodes_per_axis=n, converged=converged,
        c_estimate=c_est, param_integral=integral, analytic_upper=analytic_upper,
        m=measure.m, label=measure.label,
    )


def _coeff_scale(f: SparsePoly) -> float:
    return math.fsum(math.sqrt(float(abs_sq(c))) for c in f.terms.values()) or 1.0


def energy_lower_bound(space: SpaceSpec, f: SparsePoly, measure: CubeMeasure,
                       n_base: int = 8, max_doublings: int = 2) -> Certificate:
    """Certificate: dist(1, {p f : p polynomial}) >= mu_total / sqrt(E_upper).

    The measure must be supported in the zero set of f on the unit sphere
    (checked on the grid against 1e-10 times the coefficient mass of f) and
    the ambient space must be the Drury-Arveson space of matching dimension,
    whose kernel 1/(1 - <z,w>) the energy integrand matches.  The audit
    records the vanishing of the monomial pairings integral z^beta f dmu up
    to degree 6, the quadrature energy, and the bound provenance.
    """
    if space.kind != "alpha" or float(space.alpha) != 0.0:
        raise ValueError("energy certificates require the Drury-Arveson space (alpha = 0)")
    if space.d != measure.d or f.dim != measure.d:
        raise ValueError("dimension mismatch between space, polynomial and measure")
    if measure.m < 3:
        raise ValueError(f"energy certificates need a cube of dimension >= 3, got m = {measure.m}")

    n_check = max(n_base, 8)
    T, Z = measure.grid(n_check, offset=0.0)
    fvals = evaluate_on_points(f.to_float(), Z)
    support_dev = float(np.abs(fvals).max())
    scale = _coeff_scale(f)
    if support_dev > SUPPORT_TOL * scale:
        raise ValueError(f"measure is not supported in the zero set: max |f| = {support_dev:.2e}")

    res = energy(measure, n_base=n_base, max_doublings=max_doublings)
    mu_total = measure.total_mass
    lower = mu_total / math.sqrt(res.analytic_upper)

    wq = measure.scale * (2.0 / n_check) ** measure.m
    pairings = {}
    from .approx import graded_monomials

    pair_max = 0.0
    for beta in graded_monomials(measure.d, 6):
        mono = np.ones(Z.shape[0], dtype=complex)
        for i, e in enumerate(beta):
            if e:
                mono *= Z[:, i] ** e
        val = abs(complex(np.sum(mono * fvals) * wq))
        pair_max = max(pair_max, val)
    pairings["max_abs_monomial_pairing_deg6"] = pair_max

    audit = {
        "mu_total": mu_total,
        "energy_quadrature": res.value,
        "energy_rel_change_on_doubling": res.rel_change,
        "energy_converged": res.converged,
        "c_estimate_grid_min": res.c_estimate,
        "param_box_inv_sq_integral": res.param_integral,
        "energy_upper_analytic": res.analytic_upper,
        "bound_constant_form": "2/c^2 via |1-<z,w>| >= |z-w|^2/2 >= (c^2/2)|t-s|^2",
        "alt_constant_2_over_c_value": (2.0 / res.c_estimate) * res.param_integral * measure.scale**2,
        "support_max_abs_f": support_dev,
        **pairings,
    }
    grid = {
        "family": measure.label,
        "m": measure.m,
        "nodes_per_axis": res.nodes_per_axis,
        "offset_scheme": "midpoint pair, half-cell shift",
        "shrink": measure.shrink,
    }
    return Certificate(kind="energy", lower_bound=lower, audit=audit, grid=grid)


def domination_constant(f: SparsePoly, g: SparsePoly, j: int, radii=None,
                        n_sphere: int = 64, seed: int = 0) -> float:
    """Grid estimate of sup over the ball of |g|^j / |f| (may be inf).

    The grid is a radial-spherical product: each radius (default up to
    0.9999) times n_sphere pseudo-random points of the unit sphere of C^d.
    """
    if f.dim != g.dim:
        raise ValueError("f and g must share a dimension")
    if j < 0:
        raise ValueError("j must be >= 0")
    d = f.dim
    radii = [0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 0.9999] if radii is None else list(radii)
    rng = np.random.default_rng(seed)
    w = rng.normal(size=(n_sphere, d)) + 1j * rng.normal(size=(n_sphere, d))
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    best = 0.0
    ff = f.to_float()
    gf = g.to_float()
    for r in radii:
        Z = r * w
        fv = np.abs(evaluate_on_points(ff, Z))
        gv = np.abs(evaluate_on_points(gf, Z)) ** j
        with np.errstate(divide="ignore"):
            ratio = np.where(fv > 0, gv / np.where(fv > 0, fv, 1.0), np.inf)
        top = float(ratio.max())
        best = max(best, top)
    return best
