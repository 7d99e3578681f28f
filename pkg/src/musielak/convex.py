"""Convex (Young/Orlicz) functions and Musielak-Orlicz norms.

Two concrete representations are supported:

* ``PowerFunction`` -- closed-form ``M(t) = scale * t**p`` with ``p > 1``;
* ``PiecewiseAffineConvex`` -- a convex piecewise-affine function with
  ``M(0) = 0``, extended linearly past its last knot, optionally with a
  finite domain bound past which the function is +inf.

Both support evaluation, (generalized) inversion and exact Legendre
conjugation.  ``MusielakSystem`` bundles one function per coordinate and
``luxemburg_norm`` evaluates the associated norm

    ||x|| = inf{ rho > 0 : sum_i M_i(|x_i| / rho) <= 1 }

by bisection on rho.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PiecewiseAffineConvex",
    "PowerFunction",
    "MusielakSystem",
    "EquivalenceReport",
    "TwoConcavityReport",
    "conjugate",
    "is_two_concave",
    "luxemburg_norm",
    "equivalence_constants",
    "system_to_json",
    "system_from_json",
    "TOL_NORM",
]

# relative tolerance of the Luxemburg bisection
TOL_NORM = 1e-10


class DegenerateTailError(ValueError):
    """Raised when an inversion hits a flat (non-invertible) tail."""


@dataclass(frozen=True)
class PiecewiseAffineConvex:
    """Convex piecewise-affine function with M(0) = 0.

    ``knots`` are strictly increasing abscissas starting at 0, ``values``
    the matching ordinates (``values[0] == 0``).  Past the last knot the
    function continues with slope ``ext_slope``.  If ``domain_bound`` is
    finite the function is +inf for ``t > domain_bound``; this is how
    degenerate conjugate tails are represented instead of storing an
    infinite value.
    """

    knots: np.ndarray
    values: np.ndarray
    ext_slope: float
    domain_bound: float | None = None

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        if knots.ndim != 1 or knots.shape != values.shape:
            raise ValueError("knots and values must be 1-d arrays of equal length")
        if knots[0] != 0.0 or values[0] != 0.0:
            raise ValueError("first knot must be (0, 0)")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if np.any(np.diff(values) < 0):
            raise ValueError("values must be nondecreasing")
        slopes = self.slopes()
        if np.any(np.diff(slopes) < -1e-12):
            raise ValueError("segment slopes must be nondecreasing (convexity)")
        if self.domain_bound is not None and self.domain_bound < knots[-1]:
            raise ValueError("domain_bound must not cut into the knot range")

    def slopes(self) -> np.ndarray:
        """All segment slopes, including the extension slope."""
        if len(self.knots) > 1:
            seg = np.diff(self.values) / np.diff(self.knots)
        else:
            seg = np.empty(0)
        return np.concatenate([seg, [self.ext_slope]])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("argument must be nonnegative")
        out = np.interp(t, self.knots, self.values)
        tail = t > self.knots[-1]
        out = np.where(tail, self.values[-1] + self.ext_slope * (t - self.knots[-1]), out)
        if self.domain_bound is not None:
            out = np.where(t > self.domain_bound * (1 + 1e-15), np.inf, out)
        return float(out) if out.ndim == 0 else out

    def inverse(self, y: float) -> float:
        """Generalized inverse sup{t : M(t) <= y} (exact interpolation)."""
        if y < 0:
            raise ValueError("argument must be nonnegative")
        top = float(self.values[-1])
        if y <= top:
            k = int(np.searchsorted(self.values, y, side="right"))
            # step back over ties so the enclosing segment is found
            k = min(k, len(self.values) - 1)
            t0, t1 = self.knots[k - 1], self.knots[k]
            v0, v1 = self.values[k - 1], self.values[k]
            if v1 == v0:  # flat segment: rightmost preimage
                return float(t1)
            return float(t0 + (y - v0) * (t1 - t0) / (v1 - v0))
        if self.ext_slope > 0:
            t = self.knots[-1] + (y - top) / self.ext_slope
            if self.domain_bound is not None:
                t = min(t, self.domain_bound)
            return float(t)
        if self.domain_bound is not None:
            return float(self.domain_bound)
        raise DegenerateTailError(f"value {y} beyond range of a flat tail")

    def conjugate(self) -> "PiecewiseAffineConvex":
        """Exact Legendre conjugate via slope duality.

        The conjugate of a convex PWA function is again PWA: its knots are
        the slopes of this function and its slopes are the knots.
        """
        seg = self.slopes()[:-1]
        kt = [0.0]
        kv = [0.0]
        for k, s in enumerate(seg):
            # M*(s_k) = s_k * t_k - v_k, continuous across segments
            kt.append(float(s))
            kv.append(float(s * self.knots[k + 1] - self.values[k + 1]))
        if self.domain_bound is None:
            ext = float(self.knots[-1])
            bound = float(self.ext_slope)
        else:
            # finite domain: one extra knot at the extension slope,
            # then slope domain_bound forever
            b = self.domain_bound
            kt.append(float(self.ext_slope))
            kv.append(float(self.ext_slope * self.knots[-1] - self.values[-1]))
            ext = float(b)
            bound = None
        kt = np.asarray(kt)
        # exact math makes the values nondecreasing from 0; clamp rounding
        kv = np.maximum.accumulate(np.maximum(np.asarray(kv), 0.0))
        keep = np.concatenate([[True], np.diff(kt) > 0])
        if bound is not None:
            # guard rounding: the extension slope can land a ulp below the
            # last interior slope even though convexity forbids it
            bound = max(bound, float(kt[keep][-1]))
        return PiecewiseAffineConvex(kt[keep], kv[keep], ext, bound)


@dataclass(frozen=True)
class PowerFunction:
    """Closed-form Orlicz function M(t) = scale * t**p with p > 1."""

    p: float
    scale: float = 1.0

    def __post_init__(self):
        if self.p <= 1:
            raise ValueError("exponent must exceed 1")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("argument must be nonnegative")
        out = self.scale * t**self.p
        return float(out) if out.ndim == 0 else out

    def inverse(self, y: float) -> float:
        if y < 0:
            raise ValueError("argument must be nonnegative")
        return float((y / self.scale) ** (1.0 / self.p))

    def conjugate(self) -> "PowerFunction":
        """Closed-form conjugate: (c t^p)* = x^q / (q (c p)^(q-1))."""
        q = self.p / (self.p - 1.0)
        cstar = (self.scale * self.p) ** (1.0 - q) / q
        return PowerFunction(q, cstar)


OrliczFunction = PowerFunction | PiecewiseAffineConvex


def conjugate(m: OrliczFunction) -> OrliczFunction:
    """Legendre conjugate M*(x) = sup_t (x t - M(t)), exact for both kinds."""
    return m.conjugate()


@dataclass(frozen=True)
class MusielakSystem:
    """Ordered list of Orlicz functions M_1, ..., M_n, one per coordinate."""

    functions: tuple

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        if len(self.functions) < 1:
            raise ValueError("need at least one function")

    @property
    def n(self) -> int:
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __getitem__(self, i):
        return self.functions[i]


@dataclass
class TwoConcavityReport:
    passed: bool
    strictly: bool
    worst_margin: float  # largest relative second difference; positive = violation


def is_two_concave(
    m: OrliczFunction,
    num_points: int = 2048,
    lo: float = 1e-6,
    hi: float = 1e3,
    tol: float = 1e-12,
) -> TwoConcavityReport:
    """Certify concavity of t -> M(sqrt t) on a log-spaced grid.

    Checks midpoint concavity between consecutive grid points.  The strict
    variant additionally requires strictly negative second differences.
    """
    t = np.logspace(math.log10(lo), math.log10(hi), num_points)
    g = lambda u: m(np.sqrt(u))
    mid = 0.5 * (t[:-1] + t[1:])
    # second difference: g(a) + g(b) - 2 g((a+b)/2); <= 0 means concave
    d2 = g(t[:-1]) + g(t[1:]) - 2.0 * g(mid)
    scale = np.maximum(np.abs(g(mid)), 1.0)
    rel = d2 / scale
    worst = float(rel.max())
    passed = worst <= tol
    strictly = passed and bool(np.all(rel < -tol))
    return TwoConcavityReport(passed, strictly, worst)


def _modular_sum(system: MusielakSystem, absx: np.ndarray, rho: float) -> float:
    total = 0.0
    for m, xi in zip(system, absx):
        if xi == 0.0:
            continue
        v = m(xi / rho)
        if not np.isfinite(v):
            return math.inf
        total += v
    return total


def luxemburg_norm(system: MusielakSystem, x, tol: float = TOL_NORM) -> float:
    """Luxemburg norm inf{rho > 0 : sum_i M_i(|x_i|/rho) <= 1} by bisection.

    The modular sum is nonincreasing in rho so bisection is unconditionally
    safe.  Returns 0 for the zero vector by definition.
    """
    absx = np.abs(np.asarray(x, dtype=float))
    if len(absx) != system.n:
        raise ValueError("vector length must match system dimension")
    if not absx.any():
        return 0.0
    n = system.n
    inv1 = [m.inverse(1.0) for m in system]
    invn = [m.inverse(1.0 / n) for m in system]
    lo = float(absx.max() / max(inv1))
    hi = float(absx.sum() / min(invn))
    if hi <= lo:
        hi = lo * (1 + 1e-6) + 1e-300
    # guard the bracket (exact for valid Orlicz functions)
    while _modular_sum(system, absx, hi) > 1.0:
        hi *= 2.0
    while lo > 0 and _modular_sum(system, absx, lo) < 1.0:
        lo *= 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _modular_sum(system, absx, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * hi:
            break
    return hi


@dataclass
class EquivalenceReport:
    """Empirical two-sided equivalence constants with the observed ratios."""

    c_low: float
    c_high: float
    ratios: np.ndarray
    samples: int
    instance: str = ""

    def __post_init__(self):
        self.ratios = np.asarray(self.ratios, dtype=float)
        if self.c_low <= 0:
            raise ValueError("c_low must be positive")
        if self.ratios.size and (
            self.ratios.min() < self.c_low - 1e-12 or self.ratios.max() > self.c_high + 1e-12
        ):
            raise ValueError("recorded ratios fall outside [c_low, c_high]")

    @property
    def spread(self) -> float:
        return self.c_high / self.c_low


def equivalence_constants(
    a: MusielakSystem, b: MusielakSystem, grid, instance: str = ""
) -> EquivalenceReport:
    """Inverse-ratio equivalence constants between two systems.

    Evaluates M_i^{-1}(t) / N_i^{-1}(t) over all coordinates i and all grid
    points t > 0 and reports the extreme ratios.
    """
    if a.n != b.n:
        raise ValueError("systems must have equal dimension")
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0):
        raise ValueError("grid points must be positive")
    ratios = []
    for ma, mb in zip(a, b):
        for t in grid:
            denom = mb.inverse(float(t))
            if denom == 0.0:
                raise ValueError("invalid Orlicz function: zero inverse at t > 0")
            ratios.append(ma.inverse(float(t)) / denom)
    ratios = np.asarray(ratios)
    return EquivalenceReport(float(ratios.min()), float(ratios.max()), ratios, ratios.size, instance)


# ---------------------------------------------------------------------------
# JSON serialization


def _function_to_dict(m: OrliczFunction) -> dict:
    if isinstance(m, PowerFunction):
        return {"kind": "power", "p": m.p, "scale": m.scale}
    d = {
        "kind": "pwa",
        "knots": list(map(float, m.knots)),
        "values": list(map(float, m.values)),
        "ext_slope": float(m.ext_slope),
    }
    if m.domain_bound is not None:
        d["domain_bound"] = float(m.domain_bound)
    return d


def _function_from_dict(d: dict) -> OrliczFunction:
    if d["kind"] == "power":
        return PowerFunction(d["p"], d.get("scale", 1.0))
    if d["kind"] == "pwa":
        return PiecewiseAffineConvex(
            np.asarray(d["knots"]),
            np.asarray(d["values"]),
            d["ext_slope"],
            d.get("domain_bound"),
        )
    raise ValueError(f"unknown function kind {d['kind']!r}")


def system_to_json(system: MusielakSystem) -> str:
    doc = {"n": system.n, "functions": [_function_to_dict(m) for m in system]}
    return json.dumps(doc)


def system_from_json(text: str) -> MusielakSystem:
    doc = json.loads(text)
    funcs = [_function_from_dict(d) for d in doc["functions"]]
    if doc.get("n") is not None and doc["n"] != len(funcs):
        raise ValueError("declared dimension does not match function count")
    return MusielakSystem(tuple(funcs))
