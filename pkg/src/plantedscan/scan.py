"""Scan tests for an overdense planted subset.

Two variants.  The known-probability statistic compares the observed edge
count of a candidate subset D against its exact null mean m_D:

    T(D) = m_D * h(e(D)/m_D - 1) / (|D| * ln(n/|D|)),

the Bennett tail exponent of the observed overshoot, normalised so that a
union bound over all subsets of size at most r is summable once T exceeds
1 + eps/2.  The blind variant substitutes a cross-edge estimate of m_D
(floored away from zero) and restricts candidate sizes to at least
ceil(r^(1/3)), rejecting at 1 + eps/3.

Scans maximise the statistic over a subset family.  Candidates stream in
batches (size ascending, lexicographic within a size) and are evaluated
vectorised; the first strict maximum in that order wins, which breaks
ties toward the smaller subset, then the lexicographically smallest
vertex tuple, independent of batch boundaries.  The one-subset statistic
functions run through the same float kernel, so a scan outcome is
bit-for-bit reproducible by evaluating them subset by subset.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

import numpy as np

from .errors import BudgetError, ValidationError
from .kernels import entropy_h_vec
from .model import (
    EdgeProbabilityModel,
    GraphSample,
    Homogeneous,
    RankOne,
    check_subset,
    expected_edges_null,
)

__all__ = [
    "Exhaustive",
    "WeightPrefix",
    "Explicit",
    "SubsetFamily",
    "ScanConfig",
    "ScanOutcome",
    "min_blind_size",
    "stat_known",
    "scan_known",
    "estimate_from_totals",
    "estimate_expected_edges",
    "estimate_expected_edges_thresholded",
    "stat_unknown",
    "scan_unknown",
]

DEFAULT_SUBSET_BUDGET = 5_000_000

_BATCH_ROWS = 1 << 15


@dataclass(frozen=True)
class Exhaustive:
    """All subsets with min_size <= |D| <= max_size."""

    min_size: int
    max_size: int

    def __post_init__(self) -> None:
        if not 1 <= self.min_size <= self.max_size:
            raise ValidationError(
                f"need 1 <= min_size <= max_size, got [{self.min_size}, {self.max_size}]"
            )

    def count(self, n: int) -> int:
        return sum(math.comb(n, k) for k in range(self.min_size, min(self.max_size, n) + 1))

    def size_range(self, n: int) -> tuple[int, int]:
        return self.min_size, min(self.max_size, n)


@dataclass(frozen=True)
class WeightPrefix:
    """Prefixes of the weight-sorted vertex order (rank-one models only).

    Vertices are ranked by decreasing weight, ties broken by vertex id, and
    the family contains the first k vertices for each k in the size range.
    """

    min_size: int
    max_size: int

    def __post_init__(self) -> None:
        if not 1 <= self.min_size <= self.max_size:
            raise ValidationError(
                f"need 1 <= min_size <= max_size, got [{self.min_size}, {self.max_size}]"
            )

    def count(self, n: int) -> int:
        return min(self.max_size, n) - self.min_size + 1

    def size_range(self, n: int) -> tuple[int, int]:
        return self.min_size, min(self.max_size, n)


@dataclass(frozen=True)
class Explicit:
    """A caller-supplied list of candidate subsets."""

    subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.subsets:
            raise ValidationError("Explicit family must contain at least one subset")
        object.__setattr__(
            self, "subsets", tuple(tuple(int(v) for v in sorted(s)) for s in self.subsets)
        )

    def count(self, n: int) -> int:
        return len(self.subsets)

    def size_range(self, n: int) -> tuple[int, int]:
        sizes = [len(s) for s in self.subsets]
        return min(sizes), max(sizes)


SubsetFamily = Union[Exhaustive, WeightPrefix, Explicit]


@dataclass(frozen=True)
class ScanConfig:
    """Scan parameters: community size bound r, slack eps, candidate family.

    family=None means the widest admissible exhaustive family for the scan
    variant.  epsilon may be math.inf, which yields a test that never
    rejects (useful as a sentinel in harness checks).
    """

    r: int
    epsilon: float = 0.2
    family: SubsetFamily | None = None
    budget: int = DEFAULT_SUBSET_BUDGET

    def __post_init__(self) -> None:
        if not isinstance(self.r, (int, np.integer)) or isinstance(self.r, bool):
            raise ValidationError(f"r must be an integer, got {self.r!r}")
        if self.r < 1:
            raise ValidationError(f"r must be >= 1, got {self.r}")
        if not self.epsilon > 0:
            raise ValidationError(f"epsilon must be > 0, got {self.epsilon}")
        if self.budget < 1:
            raise ValidationError(f"budget must be >= 1, got {self.budget}")


@dataclass(frozen=True)
class ScanOutcome:
    statistic: float
    subset: tuple[int, ...]
    threshold: float
    reject: bool
    epsilon: float
    r: int
    family: dict
    size_trace: dict[int, tuple[float, tuple[int, ...]]] | None = None
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "statistic": self.statistic,
            "subset": list(self.subset),
            "threshold": self.threshold,
            "reject": self.reject,
            "family": self.family,
            "epsilon": self.epsilon,
            "r": self.r,
            "metadata": dict(self.metadata),
        }
        if self.size_trace is not None:
            out["size_trace"] = {
                str(k): {"statistic": s, "subset": list(d)} for k, (s, d) in self.size_trace.items()
            }
        return out


def min_blind_size(r: int) -> int:
    """ceil(r^(1/3)), guarded against the cube root landing a hair above an
    integer in floating point (e.g. 27**(1/3) == 3.0000000000000004)."""
    if r < 1:
        raise ValidationError(f"r must be >= 1, got {r}")
    return max(1, math.ceil(r ** (1.0 / 3.0) - 1e-9))


def _describe(family: SubsetFamily) -> dict:
    if isinstance(family, Exhaustive):
        return {"kind": "exhaustive", "min_size": family.min_size, "max_size": family.max_size}
    if isinstance(family, WeightPrefix):
        return {"kind": "weight_prefix", "min_size": family.min_size, "max_size": family.max_size}
    return {"kind": "explicit", "count": len(family.subsets)}


def _combination_batches(n: int, k: int) -> Iterator[np.ndarray]:
    source = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(source, _BATCH_ROWS))
        if not block:
            return
        flat = np.fromiter(itertools.chain.from_iterable(block), dtype=np.int64,
                           count=len(block) * k)
        yield flat.reshape(len(block), k)


def _iter_batches(family: SubsetFamily, n: int,
                  model: EdgeProbabilityModel | None) -> Iterator[np.ndarray]:
    """(m, k) arrays of row-sorted subsets, sizes ascending, lexicographic
    within each size."""
    if isinstance(family, Exhaustive):
        lo, hi = family.size_range(n)
        for k in range(lo, hi + 1):
            yield from _combination_batches(n, k)
    elif isinstance(family, WeightPrefix):
        if not isinstance(model, RankOne):
            raise ValidationError("WeightPrefix requires a rank-one model with known weights")
        order = np.argsort(-model.weights, kind="stable")
        lo, hi = family.size_range(n)
        for k in range(lo, hi + 1):
            yield np.sort(order[:k]).astype(np.int64).reshape(1, k)
    else:
        ordered = sorted(family.subsets, key=lambda s: (len(s), s))
        start = 0
        while start < len(ordered):
            k = len(ordered[start])
            end = start
            while end < len(ordered) and len(ordered[end]) == k:
                end += 1
            for lo_i in range(start, end, _BATCH_ROWS):
                block = ordered[lo_i : min(lo_i + _BATCH_ROWS, end)]
                rows = np.empty((len(block), k), dtype=np.int64)
                for t, s in enumerate(block):
                    rows[t] = check_subset(n, s)
                yield rows
            start = end


def _check_scan_size(n: int, k: int) -> None:
    if k == 0:
        raise ValidationError("statistic undefined for the empty subset")
    if k >= n:
        raise ValidationError(f"statistic undefined for |D| = {k} with n = {n} (needs |D| < n)")


def _edges_within_batch(sample: GraphSample, rows: np.ndarray) -> np.ndarray:
    """e(D) for every row; rows hold sorted vertex ids."""
    tri = sample._tri
    off = sample._row_offsets
    m, k = rows.shape
    counts = np.zeros(m, dtype=np.int64)
    for a in range(k - 1):
        ia = rows[:, a]
        base = off[ia] - ia - 1
        for b in range(a + 1, k):
            counts += tri[base + rows[:, b]]
    return counts


def _degree_vector(sample: GraphSample) -> np.ndarray:
    tri = sample._tri
    off = sample._row_offsets
    n = sample.n
    deg = np.zeros(n, dtype=np.int64)
    for i in range(n - 1):
        row = tri[off[i] : off[i] + n - 1 - i]
        deg[i] += int(row.sum())
        deg[i + 1 :][row] += 1
    return deg


def _expected_within_batch(model: EdgeProbabilityModel, rows: np.ndarray) -> np.ndarray:
    """E0[e(D)] per row, matching expected_edges_null's float operations."""
    m, k = rows.shape
    if k < 2:
        return np.zeros(m)
    if isinstance(model, Homogeneous):
        return np.full(m, k * (k - 1) / 2 * model.p)
    if isinstance(model, RankOne):
        w = model.weights
        s = w[rows].sum(axis=1)
        ss = (w * w)[rows].sum(axis=1)
        return 0.5 * (s * s - ss)
    acc = np.zeros(m)
    for a in range(k - 1):
        ia = rows[:, a]
        for b in range(a + 1, k):
            acc += model.matrix[ia, rows[:, b]]
    return acc


def _known_stat_from_counts(n: int, k: int, counts: np.ndarray,
                            means: np.ndarray) -> np.ndarray:
    safe = np.where(means > 0.0, means, 1.0)
    x = np.maximum(counts / safe - 1.0, 0.0)
    x = np.where(means > 0.0, x, 0.0)
    return means * entropy_h_vec(x) / (k * math.log(n / k))


def _blind_stat_from_counts(n_eff: int, k: int, counts: np.ndarray,
                            cross: np.ndarray, e_total: float) -> np.ndarray:
    radicand = np.maximum(e_total - 2.0 * cross, 0.0)
    root = math.sqrt(e_total) - np.sqrt(radicand)
    estimate = root * root / 4.0
    floor = (k * k / n_eff) * math.log(n_eff / k) ** 4
    mean = np.maximum(estimate, floor)
    x = np.maximum(counts / mean - 1.0, 0.0)
    return mean * entropy_h_vec(x) / (k * math.log(n_eff / k))


def stat_known(model: EdgeProbabilityModel, sample: GraphSample,
               subset: Iterable[int]) -> float:
    """Known-probability scan statistic of one subset.

    Zero whenever the subset shows no overshoot; zero by convention when
    the null mean is zero (such subsets carry no evidence either way).
    """
    d = check_subset(sample.n, subset)
    _check_scan_size(sample.n, d.size)
    if model.n != sample.n:
        raise ValidationError(f"model has n={model.n} but sample has n={sample.n}")
    counts = np.array([sample.edges_within(d)], dtype=np.int64)
    means = np.array([expected_edges_null(model, d)])
    return float(_known_stat_from_counts(sample.n, d.size, counts, means)[0])


def _scan_batches(batches: Iterator[np.ndarray], n: int, stat_batch,
                  keep_trace: bool) -> tuple[float, tuple[int, ...], dict | None, int]:
    best_stat = -math.inf
    best_subset: tuple[int, ...] | None = None
    trace: dict[int, tuple[float, tuple[int, ...]]] = {}
    evaluated = 0
    for rows in batches:
        m, k = rows.shape
        _check_scan_size(n, k)
        evaluated += m
        stats = stat_batch(k, rows)
        i = int(np.argmax(stats))
        mx = float(stats[i])
        if mx > best_stat:
            best_stat = mx
            best_subset = tuple(int(v) for v in rows[i])
        if keep_trace and (k not in trace or mx > trace[k][0]):
            trace[k] = (mx, tuple(int(v) for v in rows[i]))
    if best_subset is None:
        raise ValidationError("subset family yielded no candidates")
    return best_stat, best_subset, (trace if keep_trace else None), evaluated


def scan_known(model: EdgeProbabilityModel, sample: GraphSample, config: ScanConfig,
               keep_trace: bool = False) -> ScanOutcome:
    """Maximise the known-probability statistic over the family; reject when
    the maximum reaches 1 + eps/2.

    The family must stay within sizes [1, r].  The enumeration size is
    checked against config.budget before any work happens.
    """
    n = sample.n
    if model.n != n:
        raise ValidationError(f"model has n={model.n} but sample has n={n}")
    if config.r >= n:
        raise ValidationError(f"r must be < n, got r={config.r}, n={n}")
    family = config.family or Exhaustive(1, config.r)
    lo, hi = family.size_range(n)
    if hi > config.r:
        raise ValidationError(f"family reaches size {hi}, above the scan bound r={config.r}")
    count = family.count(n)
    if count > config.budget:
        raise BudgetError(
            f"family enumerates {count} subsets, over the budget {config.budget}"
        )
    threshold = 1.0 + config.epsilon / 2.0

    def stat_batch(k: int, rows: np.ndarray) -> np.ndarray:
        counts = _edges_within_batch(sample, rows)
        means = _expected_within_batch(model, rows)
        return _known_stat_from_counts(n, k, counts, means)

    stat, subset, trace, evaluated = _scan_batches(
        _iter_batches(family, n, model), n, stat_batch, keep_trace
    )
    return ScanOutcome(
        statistic=stat,
        subset=subset,
        threshold=threshold,
        reject=stat >= threshold,
        epsilon=config.epsilon,
        r=config.r,
        family=_describe(family),
        size_trace=trace,
        metadata=_metadata(n, config.r, evaluated),
    )


def _metadata(n: int, r: int, evaluated: int) -> dict:
    md = {"subsets_evaluated": evaluated}
    if r >= n / 2:
        # the per-size normalisation ln(n/|D|) degenerates as |D| -> n;
        # results at r >= n/2 are outside the calibrated regime
        md["large_r"] = True
    return md


def estimate_from_totals(total_edges: float, cross_edges: float) -> float:
    """The mean-estimate formula as a pure function of the two counts:

        (sqrt(e(V)) - sqrt(e(V) - 2 e(D, V\\D)))^2 / 4.

    Exposed separately so the algebraic identity behind it can be checked
    on exact expectations, not just on sampled integer counts.  The inner
    square root's argument is clamped at zero (sampling noise can push it
    negative)."""
    total_edges = float(total_edges)
    cross_edges = float(cross_edges)
    if total_edges < 0.0 or cross_edges < 0.0:
        raise ValidationError("edge counts must be nonnegative")
    radicand = max(total_edges - 2.0 * cross_edges, 0.0)
    root = math.sqrt(total_edges) - math.sqrt(radicand)
    return root * root / 4.0


def estimate_expected_edges(sample: GraphSample, subset: Iterable[int]) -> float:
    """Null-mean estimate for e(D) built only from the observed graph.

    Uses total and cross edge counts of the sample; exact in expectation
    for rank-one models when the subset holds the larger weights but less
    than half the total weight.
    """
    d = check_subset(sample.n, subset)
    _check_scan_size(sample.n, d.size)
    return estimate_from_totals(sample.total_edges(), sample.edges_across(d))


def estimate_expected_edges_thresholded(sample: GraphSample, subset: Iterable[int],
                                        n: int | None = None) -> float:
    """The estimate floored at (|D|^2 / n) * ln(n/|D|)^4, the level below
    which the raw estimate is too noisy to normalise a test statistic.

    n defaults to the sample's vertex count; passing another value is an
    experimentation hook and changes only the floor."""
    d = check_subset(sample.n, subset)
    _check_scan_size(sample.n, d.size)
    n = sample.n if n is None else int(n)
    if n <= d.size:
        raise ValidationError(f"floor undefined for n={n} <= |D|={d.size}")
    k = d.size
    floor = (k * k / n) * math.log(n / k) ** 4
    return max(estimate_expected_edges(sample, d), floor)


def stat_unknown(sample: GraphSample, subset: Iterable[int],
                 n: int | None = None) -> float:
    """Blind scan statistic: the known-probability form with the null mean
    replaced by its floored estimate."""
    d = check_subset(sample.n, subset)
    _check_scan_size(sample.n, d.size)
    n_eff = sample.n if n is None else int(n)
    if n_eff <= d.size:
        raise ValidationError(f"floor undefined for n={n_eff} <= |D|={d.size}")
    counts = np.array([sample.edges_within(d)], dtype=np.int64)
    cross = np.array([sample.edges_across(d)], dtype=np.int64)
    return float(_blind_stat_from_counts(n_eff, d.size, counts, cross,
                                         float(sample.total_edges()))[0])


def scan_unknown(sample: GraphSample, config: ScanConfig,
                 keep_trace: bool = False) -> ScanOutcome:
    """Maximise the blind statistic over sizes in [ceil(r^(1/3)), r];
    reject when the maximum reaches 1 + eps/3.

    Families reaching below the cube-root size floor are rejected: the
    mean estimate is not reliable there, and admitting those sizes would
    silently change the test's calibration.
    """
    n = sample.n
    if config.r >= n:
        raise ValidationError(f"r must be < n, got r={config.r}, n={n}")
    k_min = min_blind_size(config.r)
    family = config.family or Exhaustive(k_min, config.r)
    lo, hi = family.size_range(n)
    if isinstance(family, WeightPrefix):
        raise ValidationError("blind scan has no weight order to build prefixes from")
    if lo < k_min:
        raise ValidationError(
            f"family includes size {lo}, below the blind floor ceil(r^(1/3)) = {k_min}"
        )
    if hi > config.r:
        raise ValidationError(f"family reaches size {hi}, above the scan bound r={config.r}")
    count = family.count(n)
    if count > config.budget:
        raise BudgetError(
            f"family enumerates {count} subsets, over the budget {config.budget}"
        )
    threshold = 1.0 + config.epsilon / 3.0
    degrees = _degree_vector(sample)
    e_total = float(sample.total_edges())

    def stat_batch(k: int, rows: np.ndarray) -> np.ndarray:
        counts = _edges_within_batch(sample, rows)
        cross = degrees[rows].sum(axis=1) - 2 * counts
        return _blind_stat_from_counts(n, k, counts, cross, e_total)

    stat, subset, trace, evaluated = _scan_batches(
        _iter_batches(family, n, None), n, stat_batch, keep_trace
    )
    md = _metadata(n, config.r, evaluated)
    md["size_window"] = [k_min, config.r]
    return ScanOutcome(
        statistic=stat,
        subset=subset,
        threshold=threshold,
        reject=stat >= threshold,
        epsilon=config.epsilon,
        r=config.r,
        family=_describe(family),
        size_trace=trace,
        metadata=md,
    )
