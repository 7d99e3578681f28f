"""Permutation averages, decreasing rearrangements and the matrix norm.

The central quantity is the l2 permutation average

    Ave_pi ( sum_i |x_i a_{i,pi(i)}|^2 )^(1/2)

over the symmetric group, evaluated either exactly (full enumeration, small
n) or by seeded Monte Carlo.  The module also provides the two-permutation
max average and the decreasing-rearrangement bound it is equivalent to, the
matrix norm ||x||_a (greedy top-N selection), and the piecewise-affine
system whose Luxemburg norm sandwiches ||x||_a within exact factors 1/2 and
2.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .convex import MusielakSystem, PiecewiseAffineConvex, luxemburg_norm

__all__ = [
    "WeightMatrix",
    "PermutationSampler",
    "AverageResult",
    "dra",
    "ave_l2",
    "ave_max_two",
    "dra_sum_bound",
    "matrix_norm_a",
    "prefix_sum_system",
    "lemma_matrixnorm_check",
    "build_b_vector",
    "ave_max_vector",
    "all_permutations",
    "matrix_to_json",
    "matrix_from_json",
    "N_EXACT",
    "N_EXACT_PAIRS",
    "DEFAULT_SAMPLES",
]

# exact enumeration limits: 8! = 40320 single permutations, (5!)^2 pairs
N_EXACT = 8
N_EXACT_PAIRS = 5
DEFAULT_SAMPLES = 100_000


@dataclass(frozen=True)
class WeightMatrix:
    """n x N matrix with positive, nonincreasing rows (n <= N)."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        object.__setattr__(self, "entries", entries)
        if entries.ndim != 2:
            raise ValueError("entries must be a 2-d array")
        n, N = entries.shape
        if n > N:
            raise ValueError("need n <= N")
        for i in range(n):
            row = entries[i]
            if row[-1] <= 0:
                raise ValueError(f"row {i} is not strictly positive")
            if np.any(np.diff(row) > 0):
                raise ValueError(f"row {i} is not nonincreasing")

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def ncols(self) -> int:
        return self.entries.shape[1]

    @property
    def is_square(self) -> bool:
        return self.n == self.ncols


def matrix_to_json(a: WeightMatrix) -> str:
    doc = {"n": a.n, "N": a.ncols, "rows": [list(map(float, r)) for r in a.entries]}
    return json.dumps(doc)


def matrix_from_json(text: str) -> WeightMatrix:
    doc = json.loads(text)
    a = WeightMatrix(np.asarray(doc["rows"], dtype=float))
    if a.n != doc["n"] or a.ncols != doc["N"]:
        raise ValueError("declared shape does not match rows")
    return a


class PermutationSampler:
    """Reproducible uniform permutation/sign sampler.

    Built on a counter-based Philox stream so that identical seeds yield
    identical draws on every platform.  Permutations are produced by an
    explicit (vectorized) Fisher-Yates shuffle driven by the stream.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._rng = np.random.Generator(np.random.Philox(self.seed))

    def spawn(self, key: int) -> "PermutationSampler":
        """Independent sampler with a seed derived from (seed, key)."""
        derived = np.random.SeedSequence([self.seed, int(key)]).generate_state(1, np.uint64)[0]
        return PermutationSampler(int(derived))

    def permutations(self, n: int, count: int) -> np.ndarray:
        """(count, n) array of independent uniform permutations."""
        perms = np.tile(np.arange(n), (count, 1))
        rows = np.arange(count)
        for i in range(n - 1, 0, -1):
            j = self._rng.integers(0, i + 1, size=count)
            perms[rows, i], perms[rows, j] = perms[rows, j], perms[rows, i]
        return perms

    def permutation(self, n: int) -> np.ndarray:
        return self.permutations(n, 1)[0]

    def signs(self, n: int, count: int) -> np.ndarray:
        """(count, n) array of independent uniform +-1 patterns."""
        return self._rng.integers(0, 2, size=(count, n)) * 2 - 1

    def normals(self, shape) -> np.ndarray:
        return self._rng.standard_normal(shape)

    def uniform(self, lo, hi, shape) -> np.ndarray:
        return self._rng.uniform(lo, hi, shape)


@dataclass
class AverageResult:
    """A permutation-average value, exact or Monte Carlo.

    Exact results carry zero standard error; Monte Carlo results report the
    sample standard deviation divided by sqrt(samples).
    """

    value: float
    mode: str  # "exact" | "monte-carlo"
    samples: int
    stderr: float = 0.0

    def __post_init__(self):
        if self.mode not in ("exact", "monte-carlo"):
            raise ValueError("mode must be 'exact' or 'monte-carlo'")
        if self.mode == "exact" and self.stderr != 0.0:
            raise ValueError("exact results have zero standard error")

    def to_json(self) -> str:
        return json.dumps(
            {"value": self.value, "mode": self.mode, "samples": self.samples, "stderr": self.stderr}
        )


def dra(values) -> np.ndarray:
    """Decreasing rearrangement: absolute values sorted nonincreasingly.

    Ties keep original index order (stable sort), so the output is fully
    deterministic.
    """
    v = np.abs(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        raise ValueError("need a nonempty list")
    order = np.argsort(-v, kind="stable")
    return v[order]


def all_permutations(n: int) -> np.ndarray:
    """(n!, n) array of all permutations of range(n)."""
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp)


def _summarize(values: np.ndarray, mode: str) -> AverageResult:
    if mode == "exact":
        return AverageResult(float(values.mean()), "exact", values.size)
    stderr = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return AverageResult(float(values.mean()), "monte-carlo", values.size, stderr)


def ave_l2(
    a: WeightMatrix,
    x,
    mode: str = "exact",
    sampler: PermutationSampler | None = None,
    samples: int = DEFAULT_SAMPLES,
) -> AverageResult:
    """Ave_pi ( sum_i (x_i a_{i,pi(i)})^2 )^(1/2) over uniform permutations."""
    if not a.is_square:
        raise ValueError("needs a square matrix")
    n = a.n
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError("vector length must match matrix dimension")
    if mode == "exact":
        if n > N_EXACT:
            raise ValueError(f"exact mode limited to n <= {N_EXACT}")
        perms = all_permutations(n)
    elif mode == "monte-carlo":
        if sampler is None:
            raise ValueError("monte-carlo mode needs a sampler")
        perms = sampler.permutations(n, samples)
    else:
        raise ValueError("mode must be 'exact' or 'monte-carlo'")
    gathered = a.entries[np.arange(n), perms]  # (P, n)
    vals = np.sqrt(((x * gathered) ** 2).sum(axis=1))
    return _summarize(vals, mode)


def ave_max_two(
    a3,
    mode: str = "exact",
    sampler: PermutationSampler | None = None,
    samples: int = DEFAULT_SAMPLES,
) -> AverageResult:
    """Ave over pairs (pi, sigma) of max_i |a(i, pi(i), sigma(i))|."""
    a3 = np.asarray(a3, dtype=float)
    if a3.ndim != 3 or len(set(a3.shape)) != 1:
        raise ValueError("needs a cubic n x n x n array")
    n = a3.shape[0]
    idx = np.arange(n)
    if mode == "exact":
        if n > N_EXACT_PAIRS:
            raise ValueError(f"exact mode limited to n <= {N_EXACT_PAIRS}")
        perms = all_permutations(n)
        vals = np.abs(a3[idx[None, None, :], perms[:, None, :], perms[None, :, :]])
        return _summarize(vals.max(axis=2).ravel(), "exact")
    if mode != "monte-carlo":
        raise ValueError("mode must be 'exact' or 'monte-carlo'")
    if sampler is None:
        raise ValueError("monte-carlo mode needs a sampler")
    pis = sampler.permutations(n, samples)
    sigmas = sampler.permutations(n, samples)
    vals = np.abs(a3[idx[None, :], pis, sigmas]).max(axis=1)
    return _summarize(vals, "monte-carlo")


def dra_sum_bound(a3) -> float:
    """(1/n^2) * (sum of the n^2 largest absolute entries of the cube)."""
    a3 = np.asarray(a3, dtype=float)
    if a3.ndim != 3 or len(set(a3.shape)) != 1:
        raise ValueError("needs a cubic n x n x n array")
    n = a3.shape[0]
    s = dra(a3.ravel())
    return float(s[: n * n].sum() / (n * n))


def matrix_norm_a(a: WeightMatrix, x) -> float:
    """||x||_a = max over budgets sum l_i <= N of sum_i (sum_{j<=l_i} a_{i,j}) |x_i|.

    Because the rows are nonincreasing, the optimum is attained by greedily
    taking the N largest values among a_{i,j} |x_i| (which automatically form
    row prefixes).
    """
    x = np.abs(np.asarray(x, dtype=float))
    if x.shape != (a.n,):
        raise ValueError("vector length must match matrix row count")
    vals = (a.entries * x[:, None]).ravel()
    vals = np.sort(vals)[::-1]
    return float(vals[: a.ncols].sum())


def prefix_sum_system(a: WeightMatrix) -> MusielakSystem:
    """System whose conjugates interpolate M_i*(sum_{j<=m} a_{i,j}) = m/N.

    Each M_i* is the piecewise-affine function through those points (plus the
    origin), extended by its final slope; M_i is its exact conjugate.  This
    is the minimal interpolant satisfying the sandwich hypothesis.
    """
    N = a.ncols
    funcs = []
    for i in range(a.n):
        prefix = np.concatenate([[0.0], np.cumsum(a.entries[i])])
        if np.any(np.diff(prefix) <= 0):
            raise ValueError(f"row {i}: prefix sums are not strictly increasing")
        mstar = PiecewiseAffineConvex(prefix, np.arange(N + 1) / N, (1.0 / N) / a.entries[i, -1])
        funcs.append(mstar.conjugate())
    return MusielakSystem(tuple(funcs))


@dataclass
class SandwichReport:
    lower: float
    value: float
    upper: float
    passed: bool

    @property
    def ratio(self) -> float:
        return self.value / self.upper if self.upper > 0 else 1.0


def lemma_matrixnorm_check(a: WeightMatrix, x, tol: float = 1e-8) -> SandwichReport:
    """Check (1/2)||x||_a <= ||x||_{sum M_i} <= 2 ||x||_a for the prefix system."""
    na = matrix_norm_a(a, x)
    system = prefix_sum_system(a)
    nl = luxemburg_norm(system, x)
    passed = 0.5 * na - tol <= nl <= 2.0 * na + tol
    return SandwichReport(0.5 * na, nl, 2.0 * na, passed)


def build_b_vector(n: int) -> np.ndarray:
    """The vector (sqrt(n/1), ..., sqrt(n/n)) generating the l2 norm."""
    if n < 1:
        raise ValueError("n must be positive")
    return np.sqrt(n / np.arange(1, n + 1))


def ave_max_vector(
    b,
    y,
    mode: str = "exact",
    sampler: PermutationSampler | None = None,
    samples: int = DEFAULT_SAMPLES,
) -> AverageResult:
    """Ave_sigma max_k |y_k b_{sigma(k)}| over uniform permutations."""
    b = np.asarray(b, dtype=float)
    y = np.asarray(y, dtype=float)
    if b.shape != y.shape or b.ndim != 1:
        raise ValueError("need two vectors of equal length")
    n = b.size
    if mode == "exact":
        if n > N_EXACT:
            raise ValueError(f"exact mode limited to n <= {N_EXACT}")
        perms = all_permutations(n)
    elif mode == "monte-carlo":
        if sampler is None:
            raise ValueError("monte-carlo mode needs a sampler")
        perms = sampler.permutations(n, samples)
    else:
        raise ValueError("mode must be 'exact' or 'monte-carlo'")
    vals = np.abs(y * b[perms]).max(axis=1)
    return _summarize(vals, mode)
