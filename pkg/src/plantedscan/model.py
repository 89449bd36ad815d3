"""Inhomogeneous random graph models, planted alternatives, and samples.

A model assigns each unordered pair {i, j} an edge probability p_ij; under
the null every edge is an independent Bernoulli(p_ij).  A planted
alternative lifts the probabilities inside one vertex subset C to
rho * p_ij (so rho * p_ij <= 1 is part of the alternative's validity).

Samples store the adjacency upper triangle as packed bits in lexicographic
pair order, one uniform variate consumed per pair in that same order; this
makes a null sample and an alternative sample with rho = 1 bit-identical
for equal seeds.  Vertex counts are capped at 2**16: sampling streams one
row at a time, but edge counting unpacks the triangle (n*(n-1)/2 bytes)
on first use, which is the practical memory ceiling of this design.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

import numpy as np

from .errors import ValidationError
from .seeding import generator

__all__ = [
    "MAX_VERTICES",
    "Homogeneous",
    "RankOne",
    "GeneralMatrix",
    "EdgeProbabilityModel",
    "PlantedAlternative",
    "GraphSample",
    "sample_null",
    "sample_alternative",
    "sample_null_sparse",
    "expected_edges_null",
    "expected_edges_across_null",
    "expected_total_null",
    "write_edge_list",
    "read_edge_list",
    "model_to_json",
    "model_from_json",
]

MAX_VERTICES = 1 << 16

_POPCOUNT = np.array([bin(b).count("1") for b in range(256)], dtype=np.int64)


def _check_vertex_count(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValidationError(f"vertex count must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise ValidationError(f"vertex count must be >= 1, got {n}")
    if n > MAX_VERTICES:
        raise ValidationError(f"vertex count {n} exceeds the supported cap {MAX_VERTICES}")
    return n


def check_subset(n: int, subset: Iterable[int]) -> np.ndarray:
    """Sorted int64 array of distinct vertex ids in [0, n); ValidationError otherwise."""
    d = np.asarray(sorted(subset), dtype=np.int64)
    if d.size:
        if d[0] < 0 or d[-1] >= n:
            bad = d[0] if d[0] < 0 else d[-1]
            raise ValidationError(f"vertex {bad} out of range for n={n}")
        if np.any(np.diff(d) == 0):
            dup = int(d[np.where(np.diff(d) == 0)[0][0]])
            raise ValidationError(f"duplicate vertex {dup} in subset")
    return d


@dataclass(frozen=True)
class Homogeneous:
    """Every pair has the same edge probability p."""

    n: int
    p: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "n", _check_vertex_count(self.n))
        p = float(self.p)
        if not (0.0 <= p <= 1.0):
            raise ValidationError(f"p must lie in [0, 1], got {p}")
        object.__setattr__(self, "p", p)

    def probability(self, i: int, j: int) -> float:
        _check_pair(self.n, i, j)
        return self.p

    def row_probabilities(self, i: int) -> np.ndarray:
        return np.full(self.n - 1 - i, self.p)

    def max_pair_within(self, subset: np.ndarray) -> tuple[float, tuple[int, int]]:
        return self.p, (int(subset[0]), int(subset[1]))


@dataclass(frozen=True, eq=False)
class RankOne:
    """p_ij = w_i * w_j for a weight vector with entries in (0, 1)."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1:
            raise ValidationError(f"weights must be one-dimensional, got shape {w.shape}")
        _check_vertex_count(w.size)
        if w.size and not (np.all(w > 0.0) and np.all(w < 1.0)):
            bad = int(np.argmin((w > 0.0) & (w < 1.0)))
            raise ValidationError(f"weights must lie in (0, 1); weights[{bad}] = {w[bad]}")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return int(self.weights.size)

    def probability(self, i: int, j: int) -> float:
        _check_pair(self.n, i, j)
        return float(self.weights[i] * self.weights[j])

    def row_probabilities(self, i: int) -> np.ndarray:
        return self.weights[i] * self.weights[i + 1 :]

    def max_pair_within(self, subset: np.ndarray) -> tuple[float, tuple[int, int]]:
        order = subset[np.argsort(self.weights[subset], kind="stable")]
        a, b = int(order[-1]), int(order[-2])
        if a > b:
            a, b = b, a
        return float(self.weights[a] * self.weights[b]), (a, b)


@dataclass(frozen=True, eq=False)
class GeneralMatrix:
    """Arbitrary symmetric probability matrix with zero diagonal.

    The matrix must be exactly symmetric; build it as (M + M.T) / 2 first
    if it comes out of a non-symmetric computation.
    """

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"matrix must be square, got shape {m.shape}")
        _check_vertex_count(m.shape[0])
        if not np.array_equal(m, m.T):
            raise ValidationError("matrix must be exactly symmetric")
        if np.any(np.diagonal(m) != 0.0):
            bad = int(np.argmax(np.diagonal(m) != 0.0))
            raise ValidationError(f"diagonal must be zero, got matrix[{bad},{bad}] = {m[bad, bad]}")
        if np.any(m < 0.0) or np.any(m > 1.0):
            i, j = np.unravel_index(int(np.argmax((m < 0.0) | (m > 1.0))), m.shape)
            raise ValidationError(f"entries must lie in [0, 1], got matrix[{i},{j}] = {m[i, j]}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    def probability(self, i: int, j: int) -> float:
        _check_pair(self.n, i, j)
        return float(self.matrix[i, j])

    def row_probabilities(self, i: int) -> np.ndarray:
        return self.matrix[i, i + 1 :]

    def max_pair_within(self, subset: np.ndarray) -> tuple[float, tuple[int, int]]:
        sub = self.matrix[np.ix_(subset, subset)]
        k = subset.size
        iu, ju = np.triu_indices(k, 1)
        best = int(np.argmax(sub[iu, ju]))
        a, b = int(subset[iu[best]]), int(subset[ju[best]])
        return float(sub[iu[best], ju[best]]), (a, b)


EdgeProbabilityModel = Union[Homogeneous, RankOne, GeneralMatrix]


def _check_pair(n: int, i: int, j: int) -> None:
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ValidationError(f"invalid vertex pair ({i}, {j}) for n={n}")


@dataclass(frozen=True)
class PlantedAlternative:
    """A community C and its multiplicative edge-density lift rho >= 1.

    Validity against the model (rho * p_ij <= 1 for every pair inside C)
    is checked eagerly at construction; the error names the worst pair.
    """

    community: tuple[int, ...]
    rho: float
    model: EdgeProbabilityModel

    def __post_init__(self) -> None:
        c = check_subset(self.model.n, self.community)
        if c.size < 2:
            raise ValidationError(f"community must have at least 2 vertices, got {c.size}")
        rho = float(self.rho)
        if not (rho >= 1.0 and math.isfinite(rho)):
            raise ValidationError(f"rho must be finite and >= 1, got {rho}")
        p_max, pair = self.model.max_pair_within(c)
        if rho * p_max > 1.0:
            raise ValidationError(
                f"rho * p exceeds 1 inside the community: rho={rho}, "
                f"p[{pair[0]},{pair[1]}]={p_max} gives {rho * p_max}"
            )
        object.__setattr__(self, "community", tuple(int(v) for v in c))
        object.__setattr__(self, "rho", rho)

    @property
    def r(self) -> int:
        return len(self.community)


@dataclass(frozen=True, eq=False)
class GraphSample:
    """One sampled graph: packed upper-triangle bits plus provenance.

    hypothesis is "null", "planted", or "imported"; planted samples carry
    the community and rho they were drawn under.  sampler records which
    bitstream produced the graph ("dense-lexicographic" is the reference
    stream; "sparse-geometric" is statistically equivalent but yields a
    different stream for the same seed).
    """

    n: int
    packed: np.ndarray
    seed: int | None
    hypothesis: str
    sampler: str = "dense-lexicographic"
    planted_community: tuple[int, ...] | None = None
    planted_rho: float | None = None

    def __post_init__(self) -> None:
        packed = np.asarray(self.packed, dtype=np.uint8)
        expected = (self.pair_count + 7) // 8
        if packed.size != expected:
            raise ValidationError(
                f"packed triangle has {packed.size} bytes, expected {expected} for n={self.n}"
            )
        packed = packed.copy()
        packed.flags.writeable = False
        object.__setattr__(self, "packed", packed)

    @property
    def pair_count(self) -> int:
        return self.n * (self.n - 1) // 2

    @cached_property
    def _tri(self) -> np.ndarray:
        # full unpacked triangle; n*(n-1)/2 bytes, the documented memory cost
        bits = np.unpackbits(self.packed, count=self.pair_count)
        bits = bits.view(bool)
        bits.flags.writeable = False
        return bits

    @cached_property
    def _row_offsets(self) -> np.ndarray:
        i = np.arange(self.n, dtype=np.int64)
        return i * (2 * self.n - i - 1) // 2

    def pair_index(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        _check_pair(self.n, i, j)
        return int(self._row_offsets[i] + j - i - 1)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self._tri[self.pair_index(i, j)])

    def total_edges(self) -> int:
        return int(_POPCOUNT[self.packed].sum())

    def edges_within(self, subset: Iterable[int]) -> int:
        """Number of edges with both endpoints in the subset."""
        d = check_subset(self.n, subset)
        if d.size < 2:
            return 0
        iu, ju = np.triu_indices(d.size, 1)
        idx = self._row_offsets[d[iu]] + d[ju] - d[iu] - 1
        return int(self._tri[idx].sum())

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise ValidationError(f"vertex {v} out of range for n={self.n}")
        off = self._row_offsets
        row = self._tri[off[v] : off[v] + self.n - 1 - v]
        total = int(row.sum())
        if v:
            i = np.arange(v, dtype=np.int64)
            total += int(self._tri[off[i] + v - i - 1].sum())
        return total

    def edges_across(self, subset: Iterable[int]) -> int:
        """Number of edges with exactly one endpoint in the subset."""
        d = check_subset(self.n, subset)
        if d.size == 0 or d.size == self.n:
            return 0
        deg_sum = sum(self.degree(int(v)) for v in d)
        return deg_sum - 2 * self.edges_within(d)

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric boolean adjacency; refuses n > 8192 (use the
        counting methods at larger sizes)."""
        if self.n > 8192:
            raise ValidationError(
                f"adjacency_matrix would allocate {self.n}x{self.n}; "
                "use edges_within/edges_across instead"
            )
        m = np.zeros((self.n, self.n), dtype=bool)
        iu, ju = np.triu_indices(self.n, 1)
        m[iu, ju] = self._tri
        m[ju, iu] = m[iu, ju]
        return m


def _pack(bits: np.ndarray) -> np.ndarray:
    return np.packbits(bits.view(np.uint8))


def _sample_triangle(model: EdgeProbabilityModel, seed: int,
                     alt: PlantedAlternative | None) -> np.ndarray:
    n = model.n
    rng = generator(seed)
    rows = []
    if alt is not None:
        c = np.asarray(alt.community, dtype=np.int64)
        in_c = np.zeros(n, dtype=bool)
        in_c[c] = True
    for i in range(n - 1):
        p_row = np.asarray(model.row_probabilities(i), dtype=np.float64)
        if alt is not None and in_c[i]:
            p_row = p_row.copy()
            later = c[c > i] - (i + 1)
            p_row[later] = p_row[later] * alt.rho
        u = rng.random(n - 1 - i)
        rows.append(u < p_row)
    if not rows:
        return np.zeros(0, dtype=bool)
    return np.concatenate(rows)


def sample_null(model: EdgeProbabilityModel, seed: int) -> GraphSample:
    """Draw one null graph; one uniform per pair in lexicographic order."""
    bits = _sample_triangle(model, seed, None)
    return GraphSample(model.n, _pack(bits), seed, "null")


def sample_alternative(model: EdgeProbabilityModel,
                       alt: PlantedAlternative,
                       seed: int) -> GraphSample:
    """Draw one graph with the community planted; shares the null's uniform
    stream, so rho = 1 reproduces the null sample bit for bit."""
    if alt.model is not model:
        # rebind: re-validates rho * p <= 1 against the model actually sampled
        alt = PlantedAlternative(alt.community, alt.rho, model)
    bits = _sample_triangle(model, seed, alt)
    return GraphSample(model.n, _pack(bits), seed, "planted",
                       planted_community=alt.community, planted_rho=alt.rho)


def sample_null_sparse(model: Homogeneous, seed: int) -> GraphSample:
    """Geometric-skip sampler for sparse homogeneous nulls.

    Statistically equivalent to sample_null but consumes a different
    variate stream; flagged in provenance as "sparse-geometric".
    """
    if not isinstance(model, Homogeneous):
        raise ValidationError("sparse sampling is only defined for homogeneous models")
    n, p = model.n, model.p
    m = n * (n - 1) // 2
    bits = np.zeros(m, dtype=bool)
    if p >= 1.0:
        bits[:] = True
    elif p > 0.0:
        rng = generator(seed)
        pos = -1
        while True:
            pos += int(rng.geometric(p))
            if pos >= m:
                break
            bits[pos] = True
    return GraphSample(n, _pack(bits), seed, "null", sampler="sparse-geometric")


# -- null expectations --------------------------------------------------------


def expected_edges_null(model: EdgeProbabilityModel, subset: Iterable[int]) -> float:
    """E[edges inside the subset] under the null."""
    d = check_subset(model.n, subset)
    k = d.size
    if k < 2:
        return 0.0
    if isinstance(model, Homogeneous):
        return k * (k - 1) / 2 * model.p
    if isinstance(model, RankOne):
        w = model.weights[d]
        s = float(w.sum())
        return 0.5 * (s * s - float((w * w).sum()))
    return float(model.matrix[np.ix_(d, d)].sum()) / 2.0


def expected_edges_across_null(model: EdgeProbabilityModel, subset: Iterable[int]) -> float:
    """E[edges with exactly one endpoint in the subset] under the null."""
    d = check_subset(model.n, subset)
    k = d.size
    if k == 0 or k == model.n:
        return 0.0
    if isinstance(model, Homogeneous):
        return k * (model.n - k) * model.p
    if isinstance(model, RankOne):
        s = float(model.weights[d].sum())
        return s * (float(model.weights.sum()) - s)
    mask = np.ones(model.n, dtype=bool)
    mask[d] = False
    return float(model.matrix[np.ix_(d, np.where(mask)[0])].sum())


def expected_total_null(model: EdgeProbabilityModel) -> float:
    """E[total edge count] under the null."""
    if isinstance(model, Homogeneous):
        return model.n * (model.n - 1) / 2 * model.p
    if isinstance(model, RankOne):
        w = model.weights
        s = float(w.sum())
        return 0.5 * (s * s - float((w * w).sum()))
    n = model.n
    iu, ju = np.triu_indices(n, 1)
    return float(model.matrix[iu, ju].sum())


# -- interchange formats ------------------------------------------------------


def write_edge_list(sample: GraphSample, path: str | os.PathLike) -> None:
    """Text format: first line "n m", then one "i j" line per edge with
    0 <= i < j < n in lexicographic order."""
    tri = sample._tri
    off = sample._row_offsets
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{sample.n} {sample.total_edges()}\n")
        for i in range(sample.n - 1):
            row = tri[off[i] : off[i] + sample.n - 1 - i]
            for j in np.where(row)[0]:
                fh.write(f"{i} {i + 1 + int(j)}\n")


def read_edge_list(path: str | os.PathLike) -> GraphSample:
    """Inverse of write_edge_list; the result carries hypothesis "imported"."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValidationError(f"malformed header {header!r}; expected 'n m'")
        n, m = int(header[0]), int(header[1])
        _check_vertex_count(n)
        bits = np.zeros(n * (n - 1) // 2, dtype=bool)
        offsets = np.arange(n, dtype=np.int64) * (2 * n - np.arange(n, dtype=np.int64) - 1) // 2
        count = 0
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise ValidationError(f"malformed edge line {line!r}")
            i, j = int(parts[0]), int(parts[1])
            if not (0 <= i < j < n):
                raise ValidationError(f"edge ({i}, {j}) violates 0 <= i < j < n={n}")
            bits[offsets[i] + j - i - 1] = True
            count += 1
        if count != m:
            raise ValidationError(f"header claims {m} edges, file has {count}")
    return GraphSample(n, _pack(bits), None, "imported", sampler="file-import")


def model_to_json(model: EdgeProbabilityModel,
                  matrix_path: str | os.PathLike | None = None) -> dict:
    """JSON-compatible descriptor.  General matrices are stored inline as
    nested lists unless matrix_path is given, in which case the matrix is
    saved there as .npy and referenced by path."""
    if isinstance(model, Homogeneous):
        return {"variant": "homogeneous", "n": model.n, "p": model.p}
    if isinstance(model, RankOne):
        return {"variant": "rank_one", "weights": [float(w) for w in model.weights]}
    if isinstance(model, GeneralMatrix):
        if matrix_path is not None:
            path = str(matrix_path)
            if not path.endswith(".npy"):
                path += ".npy"
            np.save(path, np.asarray(model.matrix))
            return {"variant": "general", "matrix_path": path}
        return {"variant": "general", "matrix": [[float(x) for x in row] for row in model.matrix]}
    raise ValidationError(f"unknown model type {type(model).__name__}")


def model_from_json(source: dict | str | os.PathLike) -> EdgeProbabilityModel:
    """Rebuild a model from a descriptor dict or a path to a JSON file."""
    if not isinstance(source, dict):
        with open(source, "r", encoding="utf-8") as fh:
            source = json.load(fh)
    if not isinstance(source, dict) or "variant" not in source:
        raise ValidationError("model descriptor must be an object with a 'variant' key")
    variant = source["variant"]
    try:
        if variant == "homogeneous":
            return Homogeneous(int(source["n"]), float(source["p"]))
        if variant == "rank_one":
            return RankOne(np.asarray(source["weights"], dtype=np.float64))
        if variant == "general":
            if "matrix_path" in source:
                return GeneralMatrix(np.load(source["matrix_path"]))
            return GeneralMatrix(np.asarray(source["matrix"], dtype=np.float64))
    except KeyError as exc:
        raise ValidationError(f"model descriptor missing key {exc}") from exc
    raise ValidationError(f"unknown model variant {variant!r}")
