"""Canned experiments, lemma spot-checks and their file outputs.

An ``ExperimentSpec`` is a JSON-serializable description of one run:
profiles and certificates write a CSV (columns m, dist_sq, min_pivot,
runtime_ms) and/or certificate JSON plus a manifest with versions,
parameters and timings.  Bundles run their steps in a thread pool sized by
``--threads`` or the BESOVBALL_THREADS environment variable and merge
results in step order, so outputs are deterministic; in the default
deterministic mode the runtime column is written as 0 and wall times go to
the manifest only, keeping CSV bytes identical across reruns.

``verify_lemma`` holds the registry of quantitative lemma checks; each
check returns a pass flag plus margins.
"""

from __future__ import annotations

import csv
import json
import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__ as _pkg_version
from . import kernels
from .approx import (
    ProfilePoint,
    cyclicity_profile,
    distance_profile,
    finite_section_mult_bound,
    hc_profile,
    membership_profile,
)
from .certify import Certificate, CubeMeasure, dual_lower_bound, energy_lower_bound
from .embeddings import tau_compose
from .poly import (
    Series1D,
    SparsePoly,
    is_outer_1d,
    poly_from_literal,
    poly_to_literal,
    series_from_poly,
    series_invert,
)
from .scalars import ComplexRational
from .spaces import (
    BetaDensity,
    ConstantDensity,
    NormalizedVolume,
    PointMassAtOne,
    SpaceSpec,
    dilation_contraction_gap,
    slice_norm_gap,
    space_from_json,
)

THREADS_ENV = "BESOVBALL_THREADS"


def thread_budget(explicit=None) -> int:
    if explicit:
        return max(1, int(explicit))
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


# -- experiment specs ----------------------------------------------------------


@dataclass
class ExperimentSpec:
    name: str
    kind: str  # "profile" | "hc" | "member" | "dual-certify" | "energy-certify" | "bundle"
    space: dict | None = None
    params: dict = field(default_factory=dict)
    claim: str = ""
    seed: int = 0
    deterministic: bool = True

    def to_json(self) -> dict:
        return {
            "name": self.name, "kind": self.kind, "space": self.space,
            "params": self.params, "claim": self.claim, "seed": self.seed,
            "deterministic": self.deterministic,
        }

    @staticmethod
    def from_json(obj) -> "ExperimentSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return ExperimentSpec(
            name=obj["name"], kind=obj["kind"], space=obj.get("space"),
            params=obj.get("params", {}), claim=obj.get("claim", ""),
            seed=int(obj.get("seed", 0)), deterministic=bool(obj.get("deterministic", True)),
        )


def _fmt_float(x: float) -> str:
    return repr(float(x))


def write_profile_csv(path, rows: list[ProfilePoint], deterministic: bool = True):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "dist_sq", "min_pivot", "runtime_ms"])
        for row in rows:
            rt = "0" if deterministic else _fmt_float(row.runtime_ms)
            w.writerow([row.m, _fmt_float(row.dist_sq), _fmt_float(row.min_pivot), rt])


def read_profile_csv(path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return [
            {"m": int(r["m"]), "dist_sq": float(r["dist_sq"]),
             "min_pivot": float(r["min_pivot"]), "runtime_ms": float(r["runtime_ms"])}
            for r in csv.DictReader(fh)
        ]


@dataclass
class ExperimentReport:
    name: str
    outputs: dict
    summary: dict
    manifest_path: str | None = None


def _profile_rows(spec: ExperimentSpec):
    space = space_from_json(spec.space)
    p = spec.params
    degrees = p["degrees"]
    method = p.get("method", "auto")
    if spec.kind == "profile":
        f = poly_from_literal(p["f"])
        if "g" in p:
            return distance_profile(space, f, poly_from_literal(p["g"]), degrees, method=method)
        return cyclicity_profile(space, f, degrees, method=method)
    if spec.kind == "hc":
        return hc_profile(space, poly_from_literal(p["phi"]), int(p["n"]), degrees, method=method)
    if spec.kind == "member":
        return membership_profile(space, poly_from_literal(p["h"]), poly_from_literal(p["f"]), int(p["k"]), degrees, method=method)
    raise ValueError(f"not a profile kind: {spec.kind}")


def run_experiment(spec: ExperimentSpec | str | dict, out_dir, threads=None) -> ExperimentReport:
    """Run one experiment (or a registered builtin by name) into out_dir."""
    if isinstance(spec, str):
        if spec in BUILTIN_EXPERIMENTS:
            spec = BUILTIN_EXPERIMENTS[spec]()
        else:
            spec = ExperimentSpec.from_json(spec)
    elif isinstance(spec, dict):
        spec = ExperimentSpec.from_json(spec)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    outputs: dict = {}
    summary: dict = {}
    timings: dict = {}

    if spec.kind in ("profile", "hc", "member"):
        rows = _profile_rows(spec)
        csv_path = out_dir / f"{spec.name}.csv"
        write_profile_csv(csv_path, rows, deterministic=spec.deterministic)
        outputs["csv"] = str(csv_path)
        if rows:
            summary["final_m"] = rows[-1].m
            summary["final_dist_sq"] = rows[-1].dist_sq
        summary["rows"] = len(rows)

    elif spec.kind == "dual-certify":
        space = space_from_json(spec.space)
        cert = dual_lower_bound(space, poly_from_literal(spec.params["g"]),
                                poly_from_literal(spec.params["h"]), int(spec.params["j"]))
        cert_path = out_dir / f"{spec.name}.cert.json"
        cert_path.write_text(json.dumps(cert.to_json(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
        outputs["certificate"] = str(cert_path)
        summary["lower_bound"] = cert.lower_bound

    elif spec.kind == "energy-certify":
        space = space_from_json(spec.space)
        cube = cube_from_json(spec.params["cube"])
        cert = energy_lower_bound(space, poly_from_literal(spec.params["f"]), cube,
                                  n_base=int(spec.params.get("n_base", 8)),
                                  max_doublings=int(spec.params.get("max_doublings", 2)))
        cert_path = out_dir / f"{spec.name}.cert.json"
        cert_path.write_text(json.dumps(cert.to_json(), indent=1, sort_keys=True) + "\n", encoding="utf-8")
        outputs["certificate"] = str(cert_path)
        summary["lower_bound"] = cert.lower_bound

    elif spec.kind == "bundle":
        steps = [ExperimentSpec.from_json(s) for s in spec.params["steps"]]
        budget = thread_budget(threads)
        with ThreadPoolExecutor(max_workers=budget) as pool:
            futures = [pool.submit(run_experiment, s, out_dir, 1) for s in steps]
            reports = [f.result() for f in futures]
        for s, rep in zip(steps, reports):
            outputs[s.name] = rep.outputs
            summary[s.name] = rep.summary
    else:
        raise ValueError(f"unknown experiment kind: {spec.kind!r}")

    timings["total_ms"] = (time.perf_counter() - t0) * 1000.0
    manifest = {
        "name": spec.name,
        "claim": spec.claim,
        "spec": spec.to_json(),
        "outputs": outputs,
        "summary": summary,
        "timings_ms": timings,
        "versions": {
            "besovball": _pkg_version,
            "numpy": np.__version__,
            "kernel_backend": kernels.backend(),
        },
    }
    manifest_path = out_dir / f"{spec.name}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return ExperimentReport(name=spec.name, outputs=outputs, summary=summary, manifest_path=str(manifest_path))


def cube_from_json(obj) -> CubeMeasure:
    if isinstance(obj, str):
        obj = json.loads(obj)
    fam = obj.get("family")
    if fam == "torus":
        return CubeMeasure.torus(int(obj["k"]), int(obj["d"]), shrink=float(obj.get("shrink", 0.05)))
    if fam == "sphere":
        return CubeMeasure.sphere_patch(int(obj["k"]), int(obj["d"]), shrink=float(obj.get("shrink", 0.1)))
    raise ValueError(f"unknown cube family: {fam!r} (expected torus or sphere)")


# -- builtin experiments --------------------------------------------------------


def _lit(f: SparsePoly) -> dict:
    return poly_to_literal(f)


def _poly_1m2z1z2() -> SparsePoly:
    return SparsePoly(2, {(0, 0): 1, (1, 1): -2})


def _poly_1m16z1234() -> SparsePoly:
    return SparsePoly(4, {(0, 0, 0, 0): 1, (1, 1, 1, 1): -16})


def _builtin_da_cyclic_d2() -> ExperimentSpec:
    return ExperimentSpec(
        name="da-cyclic-d2",
        kind="profile",
        space={"d": 2, "kind": "alpha", "alpha": 0},
        params={"f": _lit(_poly_1m2z1z2()), "degrees": list(range(0, 25, 2)), "method": "float"},
        claim="distance from 1 to degree-m polynomial multiples of 1-2*z1*z2 in the "
              "2-variable Drury-Arveson space decreases toward 0 (the polynomial is cyclic)",
    )


def _builtin_da_noncyclic_d4() -> ExperimentSpec:
    profile = ExperimentSpec(
        name="da-noncyclic-d4-profile",
        kind="profile",
        space={"d": 4, "kind": "alpha", "alpha": 0},
        params={"f": _lit(_poly_1m16z1234()), "degrees": list(range(0, 13, 2)), "method": "float"},
        claim="profile distances for 1-16*z1*z2*z3*z4 in the 4-variable Drury-Arveson space",
    )
    cert = ExperimentSpec(
        name="da-noncyclic-d4-cert",
        kind="energy-certify",
        space={"d": 4, "kind": "alpha", "alpha": 0},
        params={"f": _lit(_poly_1m16z1234()),
                "cube": {"family": "torus", "k": 4, "d": 4, "shrink": 0.05}},
        claim="the sphere zero set of 1-16*z1*z2*z3*z4 carries a 3-cube of finite "
              "Riesz-type energy, so the polynomial is not cyclic",
    )
    return ExperimentSpec(
        name="da-noncyclic-d4",
        kind="bundle",
        params={"steps": [profile.to_json(), cert.to_json()]},
        claim="non-cyclicity of 1-16*z1*z2*z3*z4: every profile distance stays above "
              "the energy certificate lower bound",
    )


def _builtin_hc_dirichlet4() -> ExperimentSpec:
    one_minus_z = SparsePoly(1, {(0,): 1, (1,): -1})
    hc_step = ExperimentSpec(
        name="hc-dirichlet4-n2",
        kind="hc",
        space={"d": 1, "kind": "alpha", "alpha": 4},
        params={"phi": _lit(one_minus_z), "n": 2, "degrees": list(range(0, 101, 4)), "method": "float"},
        claim="on the alpha=4 disc scale, dist((1-z)^2, {p (1-z)^3}) decays to 0",
    )
    dual = ExperimentSpec(
        name="hc-dirichlet4-dual",
        kind="dual-certify",
        space={"d": 1, "kind": "alpha", "alpha": 4},
        params={"g": _lit(one_minus_z), "h": _lit(one_minus_z * one_minus_z), "j": 1},
        claim="dist(1-z, {p (1-z)^2}) on the alpha=4 disc scale stays above "
              "|d/dz (1-z)|_{z=1}| / ||L_1||",
    )
    return ExperimentSpec(
        name="hc-dirichlet4",
        kind="bundle",
        params={"steps": [hc_step.to_json(), dual.to_json()]},
        claim="1-z sits exactly one step up the cyclicity hierarchy on the alpha=4 "
              "disc scale: the squared class merges with the cubed one, the first "
              "step is blocked by a boundary-derivative functional",
    )


BUILTIN_EXPERIMENTS = {
    "da-cyclic-d2": _builtin_da_cyclic_d2,
    "da-noncyclic-d4": _builtin_da_noncyclic_d4,
    "hc-dirichlet4": _builtin_hc_dirichlet4,
}


# -- lemma checks ---------------------------------------------------------------


@dataclass
class LemmaReport:
    name: str
    passed: bool
    margins: dict
    params: dict


def _random_exact_poly(rng: random.Random, d: int, max_deg: int = 4, max_terms: int = 5,
                       complex_coeffs: bool = True) -> SparsePoly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        beta = [0] * d
        for _ in range(rng.randint(0, max_deg)):
            beta[rng.randrange(d)] += 1
        re = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        im = Fraction(rng.randint(-9, 9), rng.randint(1, 9)) if complex_coeffs and rng.random() < 0.5 else Fraction(0)
        terms[tuple(beta)] = ComplexRational(re, im)
    f = SparsePoly(d, terms)
    return f if not f.is_zero() else SparsePoly.one(d)


def _check_dilation_contraction(params: dict) -> LemmaReport:
    """(1-r) ||f||_{order N} dominates ||f - f_r||_{order N-1}; exact arithmetic."""
    trials = int(params.get("trials", 100))
    N = int(params.get("N", 2))
    d = int(params.get("d", 2))
    seed = int(params.get("seed", 0))
    radii = [Fraction(1, 10), Fraction(1, 2), Fraction(9, 10), Fraction(99, 100)]
    measures = [PointMassAtOne(), NormalizedVolume(d), ConstantDensity(Fraction(1)), BetaDensity(2)]
    rng = random.Random(seed)
    min_gap = None
    count = 0
    for t in range(trials):
        f = _random_exact_poly(rng, d)
        space = SpaceSpec.besov(d, N, measures[t % len(measures)])
        for r in radii:
            gap = dilation_contraction_gap(space, f, r)
            count += 1
            if gap < 0:
                return LemmaReport("dilation-contraction", False,
                                   {"violation": float(gap), "trial": t, "r": str(r)}, params)
            g = float(gap)
            min_gap = g if min_gap is None else min(min_gap, g)
    return LemmaReport("dilation-contraction", True,
                       {"min_gap": min_gap, "comparisons": count}, params)


def _check_slice_bound(params: dict) -> LemmaReport:
    """sum_n |f_n(z)|^2 <= Drury-Arveson norm^2 on the sphere, float path."""
    trials = int(params.get("trials", 100))
    d = int(params.get("d", 3))
    seed = int(params.get("seed", 0))
    tol = float(params.get("tol", 1e-10))
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(trials):
        nterms = int(rng.integers(1, 7))
        terms = {}
        for _ in range(nterms):
            beta = tuple(int(b) for b in rng.integers(0, 4, size=d))
            terms[beta] = complex(rng.normal(), rng.normal())
        f = SparsePoly(d, terms)
        z = rng.normal(size=d) + 1j * rng.normal(size=d)
        z = z / np.linalg.norm(z)
        gap = slice_norm_gap(f, tuple(z))
        worst = min(worst, gap)
        if gap < -tol:
            return LemmaReport("slice-bound", False, {"violation": gap}, params)
    return LemmaReport("slice-bound", True, {"min_gap": worst, "trials": trials}, params)


def _check_slice_outer(params: dict) -> LemmaReport:
    """Slices of the diagonal image of 1-lambda have no zeros in the open disc."""
    k = int(params.get("k", 3))
    d = int(params.get("d", 3))
    points = int(params.get("points", 20))
    seed = int(params.get("seed", 0))
    margin = float(params.get("margin", 1e-9))
    one_minus = SparsePoly(1, {(0,): 1, (1,): -1})
    img = tau_compose(one_minus, k, d)
    rng = np.random.default_rng(seed)
    min_mod = math.inf
    for _ in range(points):
        z = rng.normal(size=d) + 1j * rng.normal(size=d)
        z = z / np.linalg.norm(z)
        s = img.slice(tuple(z), k)
        from .poly import roots_1d

        roots = roots_1d(s)
        for r, _mult in roots:
            min_mod = min(min_mod, abs(r))
            if abs(r) < 1 - margin:
                return LemmaReport("slice-outer", False, {"root_modulus": abs(r)}, params)
    return LemmaReport("slice-outer", True,
                       {"min_root_modulus": None if min_mod is math.inf else min_mod, "points": points}, params)


def _check_onevar_derivative_bound(params: dict) -> LemmaReport:
    """Uniform-in-r bounds for derivatives of p^n / p_r on the disc.

    For k < n the k-th derivative stays sup-bounded on the disc, and the
    n-th derivative stays area-integrable, with constants independent of r;
    the committed bounds below were frozen from a reference run.
    """
    n = int(params.get("n", 2))
    M = int(params.get("M", 400))
    radii = [float(r) for r in params.get("r_grid", [0.5, 0.9, 0.99])]
    # committed from a reference run over the default grid: observed
    # sup 1.7885 and area 0.8889, stable since the evaluation is
    # deterministic
    sup_bound = float(params.get("sup_bound", 2.0))
    area_bound = float(params.get("area_bound", 1.0))
    circle_r = float(params.get("circle_radius", 0.999))
    p = poly_from_literal(params["p"]) if "p" in params else SparsePoly(1, {(0,): 1, (1,): -1})
    if p.dim != 1:
        raise ValueError("the check needs a one-variable polynomial")
    max_sup = 0.0
    max_area = 0.0
    angles = np.exp(1j * np.linspace(0.0, 2.0 * math.pi, 720, endpoint=False))
    for r in radii:
        pr = p.dilate(r)
        inv = series_invert(pr, M)
        h = ((p ** n) * inv).truncate(M)
        s = series_from_poly(h.to_float())
        for k in range(1, n):
            dk = s.derivative(k)
            vals = np.polynomial.polynomial.polyval(circle_r * angles, np.array(dk.coeffs, dtype=complex))
            max_sup = max(max_sup, float(np.abs(vals).max()))
        dn = s.derivative(n)
        area = math.fsum(abs(c) ** 2 / (i + 1) for i, c in enumerate(dn.coeffs))
        max_area = max(max_area, area)
    passed = max_sup <= sup_bound and max_area <= area_bound
    return LemmaReport("onevar-derivative-bound", passed,
                       {"max_sup_below_order": max_sup, "sup_bound": sup_bound,
                        "max_area_at_order": max_area, "area_bound": area_bound}, params)


def _check_radial_mult_section(params: dict) -> LemmaReport:
    """Observational: finite sections of the dilate-then-differentiate
    multiplier against ||phi||/(1-r^2).

    Both sides are degree-m sections, so this is a consistency check rather
    than a certificate: the ratio section(R phi_r, m) * (1-r^2) /
    section(phi, m_ref) should not exceed 1 by more than the slack.
    """
    space = space_from_json(params["space"]) if "space" in params else SpaceSpec.drury_arveson(2)
    phi = poly_from_literal(params["phi"]) if "phi" in params else SparsePoly(2, {(1, 0): 1, (0, 2): 1})
    radii = [float(r) for r in params.get("r_grid", [0.5, 0.9])]
    m = int(params.get("m", 5))
    m_ref = int(params.get("m_ref", 9))
    slack = float(params.get("slack", 0.1))
    ref = finite_section_mult_bound(space, phi, m_ref)
    ratios = {}
    ok = True
    for r in radii:
        lhs = finite_section_mult_bound(space, phi.dilate(r).radial_derivative(1).to_float(), m)
        ratio = lhs * (1.0 - r * r) / ref
        ratios[str(r)] = ratio
        if ratio > 1.0 + slack:
            ok = False
    return LemmaReport("radial-mult-section", ok, {"ratios": ratios, "reference_section": ref}, params)


LEMMA_CHECKS = {
    "dilation-contraction": _check_dilation_contraction,
    "slice-bound": _check_slice_bound,
    "slice-outer": _check_slice_outer,
    "onevar-derivative-bound": _check_onevar_derivative_bound,
    "radial-mult-section": _check_radial_mult_section,
}


def verify_lemma(name: str, params: dict | None = None) -> LemmaReport:
    """Run a registered quantitative lemma check by name."""
    if name not in LEMMA_CHECKS:
        raise ValueError(f"unknown lemma check {name!r}; known: {sorted(LEMMA_CHECKS)}")
    return LEMMA_CHECKS[name](params or {})
