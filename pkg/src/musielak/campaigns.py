"""Seed-controlled verification campaigns over random instance families.

Each campaign draws instances from a named family (``constant``,
``random-decreasing`` or ``power-family``), evaluates one of the library's
equivalence or sandwich checks per instance, and returns a summary dict
plus per-instance rows suitable for CSV export.  All randomness flows from
a single seed through per-instance derived samplers, so a campaign is
reproducible and parallelizable instance by instance.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import construct, embed, perms
from .convex import MusielakSystem, luxemburg_norm
from .perms import PermutationSampler, WeightMatrix

__all__ = [
    "make_matrix",
    "make_power_system",
    "thm1_campaign",
    "thm2_campaign",
    "lemma21_campaign",
    "lemma22_campaign",
    "khintchine_campaign",
    "roundtrip_campaign",
    "distortion_campaign",
    "construct_campaign",
    "run_parallel",
]

FAMILIES = ("constant", "random-decreasing", "power-family")
DEFAULT_EXPONENTS = (1.2, 1.5, 1.8)


def run_parallel(ids, fn, threads: int = 1):
    """Map fn over instance ids, optionally threaded; order-stable output."""
    if threads <= 1:
        return [fn(i) for i in ids]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, ids))


def make_matrix(
    family: str,
    n: int,
    sampler: PermutationSampler | None = None,
    exponents=DEFAULT_EXPONENTS,
    ncols: int | None = None,
) -> WeightMatrix:
    """Draw one weight matrix from the named instance family."""
    N = ncols if ncols is not None else n
    if family == "constant":
        return WeightMatrix(np.ones((n, N)))
    if family == "random-decreasing":
        if sampler is None:
            raise ValueError("random-decreasing needs a sampler")
        rows = np.sort(sampler.uniform(0.05, 1.0, (n, N)), axis=1)[:, ::-1]
        return WeightMatrix(rows)
    if family == "power-family":
        if n != N:
            raise ValueError("power-family matrices are square")
        return construct.matrix_from_functions(make_power_system(n, exponents), n)
    raise ValueError(f"unknown family {family!r}; choose from {FAMILIES}")


def make_power_system(n: int, exponents=DEFAULT_EXPONENTS) -> MusielakSystem:
    """Normalized power system cycling through the exponent list."""
    ps = list(itertools.islice(itertools.cycle(exponents), n))
    return MusielakSystem(tuple(construct.power_orlicz(p) for p in ps))


def _band_summary(rows):
    if not rows:
        return {"c_low": None, "c_high": None, "spread": None, "samples": 0}
    ratios = np.array([r["ratio"] for r in rows])
    return {
        "c_low": float(ratios.min()),
        "c_high": float(ratios.max()),
        "spread": float(ratios.max() / ratios.min()),
        "samples": int(ratios.size),
    }


def thm1_campaign(
    dims,
    seed: int,
    instances: int = 5,
    vectors: int = 100,
    family: str = "random-decreasing",
    threads: int = 1,
) -> dict:
    """Band of exact l2 average vs. Luxemburg norm of the matrix-built system."""
    root = PermutationSampler(seed)

    def one(args):
        n, k = args
        s = root.spawn(n * 10_000 + k)
        a = make_matrix(family, n, s)
        system = construct.functions_from_matrix(a)
        out = []
        for v in range(vectors):
            x = s.normals(n)
            lhs = perms.ave_l2(a, x, mode="exact").value
            rhs = luxemburg_norm(system, x)
            out.append(
                {"instance_id": f"n{n}-i{k}-x{v}", "n": n, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs}
            )
        return out

    jobs = [(n, k) for n in dims for k in range(instances)]
    rows = [r for chunk in run_parallel(jobs, one, threads) for r in chunk]
    per_n = {
        n: _band_summary([r for r in rows if r["n"] == n]) for n in dims
    }
    return {"rows": rows, "per_n": per_n, "band": _band_summary(rows), "passed": True}


def thm2_campaign(
    dims,
    seed: int,
    vectors: int = 500,
    exponents=DEFAULT_EXPONENTS,
    threads: int = 1,
) -> dict:
    """Same band as thm1 but for matrices produced from power systems."""
    root = PermutationSampler(seed)

    def one(n):
        s = root.spawn(n)
        system = make_power_system(n, exponents)
        a = construct.matrix_from_functions(system, n)
        out = []
        for v in range(vectors):
            x = s.normals(n)
            lhs = perms.ave_l2(a, x, mode="exact").value
            rhs = luxemburg_norm(system, x)
            out.append(
                {"instance_id": f"n{n}-x{v}", "n": n, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs}
            )
        return out

    rows = [r for chunk in run_parallel(list(dims), one, threads) for r in chunk]
    per_n = {n: _band_summary([r for r in rows if r["n"] == n]) for n in dims}
    return {"rows": rows, "per_n": per_n, "band": _band_summary(rows), "passed": True}


def lemma21_campaign(dims, seed: int, instances: int = 200, threads: int = 1) -> dict:
    """Exact two-permutation max average vs. the rearrangement bound."""
    root = PermutationSampler(seed)

    def one(args):
        n, k = args
        s = root.spawn(n * 10_000 + k)
        a3 = s.normals((n, n, n))
        lhs = perms.ave_max_two(a3, mode="exact").value
        rhs = perms.dra_sum_bound(a3)
        return {"instance_id": f"l21-n{n}-i{k}", "n": n, "lhs": lhs, "rhs": rhs, "ratio": lhs / rhs}

    jobs = [(n, k) for n in dims for k in range(instances)]
    rows = run_parallel(jobs, one, threads)
    per_n = {n: _band_summary([r for r in rows if r["n"] == n]) for n in dims}
    return {"rows": rows, "per_n": per_n, "band": _band_summary(rows), "passed": True}


def lemma22_campaign(
    dims, seed: int, instances: int = 200, tol: float = 1e-8, threads: int = 1
) -> dict:
    """Exact 1/2 .. 2 sandwich of the matrix norm by the prefix-sum system."""
    root = PermutationSampler(seed)

    def one(args):
        n, k = args
        s = root.spawn(n * 10_000 + k)
        a = make_matrix("random-decreasing", n, s)
        x = s.normals(n)
        rep = perms.lemma_matrixnorm_check(a, x, tol=tol)
        return {
            "instance_id": f"l22-n{n}-i{k}",
            "n": n,
            "lhs": rep.lower,
            "rhs": rep.value,
            "ratio": rep.ratio,
            "passed": rep.passed,
        }

    jobs = [(n, k) for n in dims for k in range(instances)]
    rows = run_parallel(jobs, one, threads)
    failures = [r["instance_id"] for r in rows if not r["passed"]]
    return {"rows": rows, "failures": failures, "passed": not failures}


def khintchine_campaign(dims, seed: int, instances: int = 200, threads: int = 1) -> dict:
    """Exact Khintchine sandwich of the embedded L1 norm, per instance."""
    root = PermutationSampler(seed)

    def one(args):
        n, k = args
        s = root.spawn(n * 10_000 + k)
        a = make_matrix("random-decreasing", n, s)
        x = s.normals(n)
        rep = embed.khintchine_sandwich_check(a, x)
        return {
            "instance_id": f"kh-n{n}-i{k}",
            "n": n,
            "lhs": rep.lower,
            "rhs": rep.value,
            "ratio": rep.value / rep.upper if rep.upper else 1.0,
            "passed": rep.passed,
        }

    jobs = [(n, k) for n in dims for k in range(instances)]
    rows = run_parallel(jobs, one, threads)
    failures = [r["instance_id"] for r in rows if not r["passed"]]
    return {"rows": rows, "failures": failures, "passed": not failures}


def roundtrip_campaign(
    dims, seed: int, family: str = "power-family", exponents=DEFAULT_EXPONENTS, threads: int = 1
) -> dict:
    """Uniform-equivalence constants of the composed constructions."""
    root = PermutationSampler(seed)

    def one(n):
        s = root.spawn(n)
        a = make_matrix(family, n, s, exponents)
        rep = construct.roundtrip_check(a)
        return {
            "instance_id": f"rt-n{n}",
            "n": n,
            "lhs": rep.c_low,
            "rhs": rep.c_high,
            "ratio": rep.spread,
        }

    rows = run_parallel(list(dims), one, threads)
    worst = max((r["ratio"] for r in rows), default=None)
    return {"rows": rows, "worst_spread": worst, "passed": True}


def distortion_campaign(
    dims, seed: int, samples: int = 500, exponents=DEFAULT_EXPONENTS, threads: int = 1
) -> dict:
    """Embedding distortion witness for power-family pipelines."""
    root = PermutationSampler(seed)

    def one(n):
        s = root.spawn(n)
        system = make_power_system(n, exponents)
        a = construct.matrix_from_functions(system, n)
        rep = embed.distortion_estimate(system, a, s, samples=samples)
        return {
            "instance_id": f"dist-n{n}",
            "n": n,
            "lhs": rep.ratio_min,
            "rhs": rep.ratio_max,
            "ratio": rep.distortion,
        }

    rows = run_parallel(list(dims), one, threads)
    return {"rows": rows, "passed": True}


def construct_campaign(
    dims,
    seed: int,
    family: str = "random-decreasing",
    exponents=DEFAULT_EXPONENTS,
    matrix=None,
) -> dict:
    """Build matrices/systems for a dimension sweep with validation info.

    An explicit ``matrix`` (list of rows) bypasses the family sweep; invalid
    input (e.g. an increasing row) is rejected with the offending row index.
    """
    if matrix is not None:
        a = WeightMatrix(np.asarray(matrix, dtype=float))
        construct.functions_from_matrix(a)
        knots = construct.conjugate_inverse_knots(a)
        return {
            "results": [
                {
                    "n": a.n,
                    "matrix": [list(map(float, r)) for r in a.entries],
                    "knot_values": [list(map(float, r)) for r in knots],
                }
            ],
            "passed": True,
        }
    root = PermutationSampler(seed)
    out = []
    for n in dims:
        s = root.spawn(n)
        if family == "power-family":
            system = make_power_system(n, exponents)
            a = construct.matrix_from_functions(system, n)
        else:
            a = make_matrix(family, n, s)
            system = construct.functions_from_matrix(a)
        knots = construct.conjugate_inverse_knots(a)
        out.append(
            {
                "n": n,
                "matrix": [list(map(float, r)) for r in a.entries],
                "knot_values": [list(map(float, r)) for r in knots],
            }
        )
    return {"results": out, "passed": True}
