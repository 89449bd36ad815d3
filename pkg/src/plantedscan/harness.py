"""Monte Carlo risk estimation and parameter sweeps.

The worst-case risk of a test is its null rejection rate plus the largest
per-community acceptance rate; the average variant replaces the max by the
mean over the supplied communities.  Every replication draws its seed from
(master_seed, stream label, replication index), so estimates are invariant
to worker count and to re-running a subset of the grid.

Sweep outputs are written per point as JSON (which makes sweeps resumable:
finished points are skipped on re-run) and collected into a CSV whose
bytes depend only on the configuration and master seed.  Timestamps go to
a separate metadata sidecar, never into the CSV.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import PlantedScanError, ValidationError
from .lr import LrProblem, likelihood_ratio_average
from .model import (
    EdgeProbabilityModel,
    GraphSample,
    PlantedAlternative,
    model_from_json,
    model_to_json,
    sample_alternative,
    sample_null,
)
from .scan import (
    DEFAULT_SUBSET_BUDGET,
    Exhaustive,
    Explicit,
    ScanConfig,
    SubsetFamily,
    WeightPrefix,
    scan_known,
    scan_unknown,
)
from .boundary import threshold_scaling
from .seeding import derive_seed, generator

__all__ = [
    "ExperimentConfig",
    "RateWithError",
    "RiskEstimate",
    "estimate_risk",
    "run_sweep",
    "TESTS",
]

TESTS = ("scan_known", "scan_unknown", "lr")


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Everything one risk estimate depends on.

    communities is either an explicit tuple of vertex tuples or an int,
    in which case that many size-r communities are drawn uniformly (from
    the master seed, so the draw is part of the experiment's identity).
    workers = 0 means take SCAN_WORKERS from the environment, default 1.
    """

    model: EdgeProbabilityModel
    test: str
    r: int
    rho: float
    communities: tuple[tuple[int, ...], ...] | int
    null_replications: int
    alt_replications: int
    epsilon: float = 0.2
    family: SubsetFamily | None = None
    budget: int = DEFAULT_SUBSET_BUDGET
    lr_exact_budget: int = 200_000
    lr_sample_size: int | None = 4096
    master_seed: int = 0
    workers: int = 0

    def __post_init__(self) -> None:
        if self.test not in TESTS:
            raise ValidationError(f"test must be one of {TESTS}, got {self.test!r}")
        if not 1 <= self.r < self.model.n:
            raise ValidationError(f"need 1 <= r < n, got r={self.r}, n={self.model.n}")
        if not (self.rho >= 1.0 and math.isfinite(self.rho)):
            raise ValidationError(f"rho must be finite and >= 1, got {self.rho}")
        if self.null_replications < 1 or self.alt_replications < 1:
            raise ValidationError("replication counts must be >= 1")
        if isinstance(self.communities, int):
            if self.communities < 1:
                raise ValidationError(f"community count must be >= 1, got {self.communities}")
        else:
            comms = tuple(tuple(int(v) for v in c) for c in self.communities)
            if not comms:
                raise ValidationError("communities must be non-empty")
            object.__setattr__(self, "communities", comms)
        if self.workers < 0:
            raise ValidationError(f"workers must be >= 0, got {self.workers}")

    def resolved_workers(self) -> int:
        if self.workers:
            return self.workers
        env = os.environ.get("SCAN_WORKERS", "")
        return max(1, int(env)) if env.isdigit() and env != "0" else 1

    def resolved_communities(self) -> tuple[tuple[int, ...], ...]:
        if not isinstance(self.communities, int):
            return self.communities
        out = []
        for j in range(self.communities):
            rng = generator(derive_seed(self.master_seed, "community-draw", j))
            c = np.sort(rng.choice(self.model.n, size=self.r, replace=False))
            out.append(tuple(int(v) for v in c))
        return tuple(out)

    @staticmethod
    def from_dict(raw: Mapping) -> "ExperimentConfig":
        raw = dict(raw)
        if "model" not in raw:
            raise ValidationError("config needs a 'model' entry")
        model = model_from_json(raw.pop("model"))
        family = raw.pop("family", None)
        if family is not None:
            family = _family_from_dict(family)
        known = {
            "test", "r", "rho", "communities", "null_replications",
            "alt_replications", "epsilon", "budget", "lr_exact_budget",
            "lr_sample_size", "master_seed", "workers",
        }
        extra = set(raw) - known
        if extra:
            raise ValidationError(f"unknown config keys: {sorted(extra)}")
        comms = raw.get("communities")
        if isinstance(comms, list):
            raw["communities"] = tuple(tuple(int(v) for v in c) for c in comms)
        return ExperimentConfig(model=model, family=family, **raw)

    def to_dict(self) -> dict:
        d = {
            "model": model_to_json(self.model),
            "test": self.test,
            "r": self.r,
            "rho": self.rho,
            "communities": (self.communities if isinstance(self.communities, int)
                            else [list(c) for c in self.communities]),
            "null_replications": self.null_replications,
            "alt_replications": self.alt_replications,
            "epsilon": self.epsilon,
            "budget": self.budget,
            "lr_exact_budget": self.lr_exact_budget,
            "lr_sample_size": self.lr_sample_size,
            "master_seed": self.master_seed,
            "workers": self.workers,
        }
        if self.family is not None:
            d["family"] = _family_to_dict(self.family)
        return d


def _family_from_dict(raw: Mapping) -> SubsetFamily:
    kind = raw.get("kind")
    if kind == "exhaustive":
        return Exhaustive(int(raw["min_size"]), int(raw["max_size"]))
    if kind == "weight_prefix":
        return WeightPrefix(int(raw["min_size"]), int(raw["max_size"]))
    if kind == "explicit":
        return Explicit(tuple(tuple(int(v) for v in s) for s in raw["subsets"]))
    raise ValidationError(f"unknown family kind {kind!r}")


def _family_to_dict(family: SubsetFamily) -> dict:
    if isinstance(family, Exhaustive):
        return {"kind": "exhaustive", "min_size": family.min_size, "max_size": family.max_size}
    if isinstance(family, WeightPrefix):
        return {"kind": "weight_prefix", "min_size": family.min_size,
                "max_size": family.max_size}
    return {"kind": "explicit", "subsets": [list(s) for s in family.subsets]}


@dataclass(frozen=True)
class RateWithError:
    rate: float
    stderr: float
    successes: int
    count: int

    def to_json(self) -> dict:
        return {"rate": self.rate, "stderr": self.stderr,
                "successes": self.successes, "count": self.count}


def _rate(successes: int, count: int) -> RateWithError:
    p = successes / count
    return RateWithError(p, math.sqrt(p * (1.0 - p) / count), successes, count)


@dataclass(frozen=True)
class RiskEstimate:
    type1: RateWithError
    type2: dict[tuple[int, ...], RateWithError]
    metadata: dict = field(default_factory=dict)

    @property
    def worst_case_risk(self) -> float:
        return self.type1.rate + max(r.rate for r in self.type2.values())

    @property
    def average_risk(self) -> float:
        rates = [r.rate for r in self.type2.values()]
        return self.type1.rate + sum(rates) / len(rates)

    def to_json(self) -> dict:
        return {
            "type1": self.type1.to_json(),
            "type2": {",".join(map(str, c)): r.to_json() for c, r in self.type2.items()},
            "worst_case_risk": self.worst_case_risk,
            "average_risk": self.average_risk,
            "metadata": dict(self.metadata),
        }


def _make_decider(config: ExperimentConfig) -> Callable[[GraphSample], bool]:
    if config.test == "scan_known":
        scan_cfg = ScanConfig(config.r, config.epsilon, config.family, config.budget)
        return lambda g: scan_known(config.model, g, scan_cfg).reject
    if config.test == "scan_unknown":
        scan_cfg = ScanConfig(config.r, config.epsilon, config.family, config.budget)
        return lambda g: scan_unknown(g, scan_cfg).reject
    problem = LrProblem(config.model, config.r, config.rho,
                        exact_budget=config.lr_exact_budget,
                        sample_size=config.lr_sample_size,
                        community_seed=config.master_seed)
    return lambda g: likelihood_ratio_average(problem, g).value > 1.0


def _run_block(config: ExperimentConfig, label: str,
               community: tuple[int, ...] | None,
               indices: Sequence[int]) -> int:
    """Rejections among the given replication indices of one stream."""
    decide = _make_decider(config)
    alt = (None if community is None
           else PlantedAlternative(community, config.rho, config.model))
    rejections = 0
    for i in indices:
        seed = derive_seed(config.master_seed, label, i)
        g = (sample_null(config.model, seed) if alt is None
             else sample_alternative(config.model, alt, seed))
        if decide(g):
            rejections += 1
    return rejections


def _worker(args) -> int:
    return _run_block(*args)


def _count_rejections(config: ExperimentConfig, label: str,
                      community: tuple[int, ...] | None, count: int,
                      pool: ProcessPoolExecutor | None, workers: int) -> int:
    indices = range(count)
    if pool is None:
        return _run_block(config, label, community, indices)
    chunks = [indices[w::workers] for w in range(workers)]
    jobs = [(config, label, community, chunk) for chunk in chunks if chunk]
    return sum(pool.map(_worker, jobs))


def estimate_risk(config: ExperimentConfig, test: str | None = None) -> RiskEstimate:
    """Type-I and per-community type-II rates for the configured test.

    test, when given, overrides config.test.  Each (hypothesis, community,
    replication) triple has its own derived seed, so the estimate does not
    depend on evaluation order or worker count, and alternative streams
    never reuse null randomness.
    """
    if test is not None and test != config.test:
        config = replace(config, test=test)
    communities = config.resolved_communities()
    for c in communities:
        if len(c) != config.r:
            raise ValidationError(f"community {c} does not have size r={config.r}")
        PlantedAlternative(c, config.rho, config.model)  # eager validity check
    workers = config.resolved_workers()
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        null_rej = _count_rejections(config, "null", None,
                                     config.null_replications, pool, workers)
        type2 = {}
        for j, c in enumerate(communities):
            alt_rej = _count_rejections(config, f"alt-{j}", c,
                                        config.alt_replications, pool, workers)
            type2[c] = _rate(config.alt_replications - alt_rej,
                             config.alt_replications)
    finally:
        if pool is not None:
            pool.shutdown()
    type1 = _rate(null_rej, config.null_replications)
    return RiskEstimate(
        type1=type1,
        type2=type2,
        metadata={
            "test": config.test,
            "n": config.model.n,
            "r": config.r,
            "rho": config.rho,
            "epsilon": config.epsilon,
            "master_seed": config.master_seed,
            "communities": [list(c) for c in communities],
        },
    )


# -- sweeps -------------------------------------------------------------------


def _risk_point(point: Mapping) -> dict:
    est = estimate_risk(ExperimentConfig.from_dict(point))
    rates = [r.rate for r in est.type2.values()]
    return {
        "type1": est.type1.rate,
        "type1_stderr": est.type1.stderr,
        "type2_max": max(rates),
        "type2_mean": sum(rates) / len(rates),
        "worst_case_risk": est.worst_case_risk,
        "average_risk": est.average_risk,
    }


def _boundary_point(point: Mapping) -> dict:
    point = dict(point)
    model = model_from_json(point["model"])
    res = threshold_scaling(model, point["community"],
                            target=float(point.get("target", 1.0)))
    return {
        "rho_star": res.rho_star,
        "optimal_size": res.optimal_size,
        "optimal_fraction": res.optimal_fraction,
        "feasible": res.feasible,
    }


_POINT_RUNNERS = {"risk": _risk_point, "boundary": _boundary_point}

_RESULT_COLUMNS = {
    "risk": ["type1", "type1_stderr", "type2_max", "type2_mean",
             "worst_case_risk", "average_risk"],
    "boundary": ["rho_star", "optimal_size", "optimal_fraction", "feasible"],
}


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def run_sweep(base: Mapping, grid: Mapping[str, Sequence], out_dir: str | os.PathLike,
              kind: str = "risk") -> str:
    """Cartesian sweep of grid values over the base configuration.

    Each grid point is written to point-NNNN.json as soon as it finishes
    (or fails: failures are recorded and the sweep continues).  Finished
    points are skipped when the sweep is re-run.  Returns the path of the
    collected CSV, whose first line is "#schema=1" and whose bytes are a
    pure function of base, grid, and kind.  An empty grid axis produces a
    header-only CSV.
    """
    if kind not in _POINT_RUNNERS:
        raise ValidationError(f"kind must be one of {sorted(_POINT_RUNNERS)}, got {kind!r}")
    for key, values in grid.items():
        if not isinstance(values, (list, tuple)):
            raise ValidationError(f"grid axis {key!r} must be a list, got {type(values).__name__}")
    os.makedirs(out_dir, exist_ok=True)
    started = time.time()
    keys = sorted(grid)
    points = list(itertools.product(*(grid[k] for k in keys)))
    results = []
    failures = 0
    for idx, combo in enumerate(points):
        path = os.path.join(out_dir, f"point-{idx:04d}.json")
        overrides = dict(zip(keys, combo))
        if os.path.exists(path):
            with open(path, "r", encoding="utf-8") as fh:
                record = json.load(fh)
        else:
            point_cfg = {**base, **overrides}
            try:
                record = {"grid": overrides, "result": _POINT_RUNNERS[kind](point_cfg)}
            except PlantedScanError as exc:
                record = {"grid": overrides,
                          "error": str(exc), "error_type": type(exc).__name__}
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(record, fh, indent=1, sort_keys=True)
        if "error" in record:
            failures += 1
        results.append(record)
    csv_path = os.path.join(out_dir, "sweep.csv")
    columns = keys + _RESULT_COLUMNS[kind] + ["error"]
    with open(csv_path, "w", newline="", encoding="ascii") as fh:
        fh.write("#schema=1\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for record in results:
            row = [_format_cell(record["grid"][k]) for k in keys]
            if "result" in record:
                row += [_format_cell(record["result"][c]) for c in _RESULT_COLUMNS[kind]]
                row.append("")
            else:
                row += [""] * len(_RESULT_COLUMNS[kind])
                row.append(record["error_type"])
            writer.writerow(row)
    meta = {
        "kind": kind,
        "points": len(points),
        "failures": failures,
        "grid_keys": keys,
        "started_at": started,
        "finished_at": time.time(),
    }
    with open(os.path.join(out_dir, "sweep-meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
    return csv_path
