"""Exact likelihood ratio against the uniform planted-community prior.

For a candidate community C with lift rho the per-community ratio is

    L_C = prod over pairs {i,j} in C of rho^A_ij * ((1 - rho p_ij)/(1 - p_ij))^(1 - A_ij),

and the full ratio L averages L_C over communities.  The test L > 1 is the
Bayes rule for the uniform prior, so its average risk

    1 - E0[|L - 1|] / 2

lower-bounds the average risk of every test; estimating it needs only
null samples.  Everything is accumulated in log space; a pair with
rho * p = 1 observed absent forces L_C = 0 exactly.

Enumeration is exact while C(n, r) fits the budget; otherwise a fixed set
of communities is sampled once per problem (reused across graph samples,
which keeps the estimator unbiased for E0-averages) or, if sampling is
disabled, the budget violation is raised before any work.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import BudgetError, ValidationError
from .model import (
    EdgeProbabilityModel,
    GraphSample,
    Homogeneous,
    RankOne,
    check_subset,
    sample_null,
)
from .seeding import derive_seed, generator

__all__ = [
    "LrProblem",
    "LrAverage",
    "BayesRiskResult",
    "likelihood_ratio_single",
    "likelihood_ratio_average",
    "bayes_risk",
]

DEFAULT_EXACT_BUDGET = 200_000
DEFAULT_SAMPLE_SIZE = 4096


def _pair_probability(model: EdgeProbabilityModel, i, j) -> np.ndarray:
    if isinstance(model, Homogeneous):
        return np.broadcast_to(np.float64(model.p), np.shape(i)).copy()
    if isinstance(model, RankOne):
        return model.weights[i] * model.weights[j]
    return model.matrix[i, j]


@dataclass(frozen=True, eq=False)
class LrProblem:
    """Model, community size, and lift defining the likelihood ratio.

    rho applies to every community unless rho_map overrides specific ones
    (keys are sorted vertex tuples).  community_seed fixes the sampled
    community set in the over-budget fallback; exact_budget bounds the
    number of enumerated communities and sample_size the fallback draw
    (None disables the fallback entirely).
    """

    model: EdgeProbabilityModel
    r: int
    rho: float
    rho_map: Mapping[tuple[int, ...], float] | None = None
    exact_budget: int = DEFAULT_EXACT_BUDGET
    sample_size: int | None = DEFAULT_SAMPLE_SIZE
    community_seed: int = 0

    def __post_init__(self) -> None:
        n = self.model.n
        if not 2 <= self.r < n:
            raise ValidationError(f"need 2 <= r < n, got r={self.r}, n={n}")
        if not (self.rho >= 1.0 and math.isfinite(self.rho)):
            raise ValidationError(f"rho must be finite and >= 1, got {self.rho}")
        if self.exact_budget < 1:
            raise ValidationError(f"exact_budget must be >= 1, got {self.exact_budget}")
        if self.sample_size is not None and self.sample_size < 1:
            raise ValidationError(f"sample_size must be >= 1, got {self.sample_size}")
        if self.rho_map is not None:
            cleaned = {}
            for key, value in self.rho_map.items():
                kt = tuple(int(v) for v in key)
                check_subset(n, kt)
                if len(kt) != self.r:
                    raise ValidationError(f"rho_map key {kt} does not have size r={self.r}")
                if not (value >= 1.0 and math.isfinite(value)):
                    raise ValidationError(f"rho_map value for {kt} must be >= 1, got {value}")
                cleaned[kt] = float(value)
            object.__setattr__(self, "rho_map", cleaned)

    @property
    def community_count(self) -> int:
        return math.comb(self.model.n, self.r)

    @cached_property
    def _bundle(self) -> dict:
        n, r = self.model.n, self.r
        if self.community_count <= self.exact_budget:
            comms = np.fromiter(
                itertools.chain.from_iterable(itertools.combinations(range(n), r)),
                dtype=np.int64,
            ).reshape(-1, r)
            mode = "exact"
        elif self.sample_size is not None:
            rng = generator(derive_seed(self.community_seed, "lr-communities"))
            comms = np.stack([
                np.sort(rng.choice(n, size=r, replace=False))
                for _ in range(self.sample_size)
            ]).astype(np.int64)
            mode = "sampled"
        else:
            raise BudgetError(
                f"C({n},{r}) = {self.community_count} communities exceed the exact "
                f"budget {self.exact_budget} and sampling is disabled"
            )
        a, b = np.triu_indices(r, 1)
        ci, cj = comms[:, a], comms[:, b]
        p = _pair_probability(self.model, ci, cj)
        rho_m = np.full(comms.shape[0], self.rho)
        if self.rho_map:
            lookup = {key: val for key, val in self.rho_map.items()}
            for m, row in enumerate(comms):
                val = lookup.get(tuple(int(v) for v in row))
                if val is not None:
                    rho_m[m] = val
        rr = rho_m[:, None]
        self._check_domain(p, rr, comms)
        q = rr * p
        # log1p on both sides so rho = 1 cancels exactly, pair by pair
        with np.errstate(divide="ignore", invalid="ignore"):
            noedge = np.log1p(-np.where(q < 1.0, q, 0.0)) - np.log1p(-p)
        noedge[q >= 1.0] = -np.inf
        # a pair with p = 1 never shows up absent; its no-edge branch is
        # unreachable, any finite placeholder keeps the arithmetic clean
        noedge[p >= 1.0] = 0.0
        pair_index = _pair_flat_index(n, ci, cj)
        return {
            "mode": mode,
            "communities": comms,
            "pair_index": pair_index,
            "edge_log": np.log(rho_m)[:, None],
            "noedge_log": noedge,
        }

    @staticmethod
    def _check_domain(p: np.ndarray, rr: np.ndarray, comms: np.ndarray) -> None:
        bad = (p == 0.0) & (rr > 1.0)
        if np.any(bad):
            m, j = np.argwhere(bad)[0]
            raise ValidationError(
                f"pair with probability 0 inside community {tuple(comms[m])} "
                "cannot be lifted by rho > 1"
            )
        over = rr * p > 1.0 + 1e-12
        if np.any(over):
            m, j = np.argwhere(over)[0]
            raise ValidationError(
                f"rho * p = {float((rr * p)[m, j])} > 1 inside community {tuple(comms[m])}"
            )

    @property
    def mode(self) -> str:
        return self._bundle["mode"]


def _pair_flat_index(n: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    return i * (2 * n - i - 1) // 2 + j - i - 1


def likelihood_ratio_single(problem: LrProblem, community: Iterable[int],
                            sample: GraphSample) -> float:
    """L_C for one community of size r; 0.0 exactly when an absent pair has
    rho * p = 1."""
    c = check_subset(sample.n, community)
    if problem.model.n != sample.n:
        raise ValidationError(f"model has n={problem.model.n} but sample has n={sample.n}")
    if c.size != problem.r:
        raise ValidationError(f"community size {c.size} does not match r={problem.r}")
    rho = problem.rho
    if problem.rho_map:
        rho = problem.rho_map.get(tuple(int(v) for v in c), rho)
    log_total = 0.0
    for a in range(c.size - 1):
        for b in range(a + 1, c.size):
            i, j = int(c[a]), int(c[b])
            p = problem.model.probability(i, j)
            if p == 0.0:
                if rho > 1.0:
                    raise ValidationError(
                        f"pair ({i},{j}) has probability 0; rho > 1 undefined there"
                    )
                continue
            if rho * p > 1.0 + 1e-12:
                raise ValidationError(f"rho * p = {rho * p} > 1 at pair ({i},{j})")
            if sample.has_edge(i, j):
                log_total += math.log(rho)
            elif rho * p >= 1.0:
                return 0.0
            else:
                log_total += math.log1p(-rho * p) - math.log1p(-p)
    return math.exp(log_total)


@dataclass(frozen=True)
class LrAverage:
    value: float
    mode: str                  # "exact" | "sampled"
    communities: int
    stderr: float | None = None  # sampling error over communities; None when exact


def likelihood_ratio_average(problem: LrProblem, sample: GraphSample) -> LrAverage:
    """Mean of L_C over the problem's community set (all of them in exact
    mode, the fixed sampled set otherwise)."""
    if problem.model.n != sample.n:
        raise ValidationError(f"model has n={problem.model.n} but sample has n={sample.n}")
    bundle = problem._bundle
    bits = sample._tri[bundle["pair_index"]]
    logs = np.where(bits, bundle["edge_log"], bundle["noedge_log"]).sum(axis=1)
    shift = float(logs.max())
    if shift == -math.inf:
        values = np.zeros(logs.shape)
    else:
        values = np.exp(logs - shift) * math.exp(shift)
    mean = float(values.mean())
    if bundle["mode"] == "exact":
        return LrAverage(mean, "exact", values.size)
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else None
    return LrAverage(mean, "sampled", values.size, se)


@dataclass(frozen=True)
class BayesRiskResult:
    risk: float
    stderr: float
    replications: int
    mode: str
    communities: int
    mean_lr: float
    mean_lr_stderr: float
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "risk": self.risk,
            "stderr": self.stderr,
            "replications": self.replications,
            "mode": self.mode,
            "M": self.communities,
            "mean_lr": self.mean_lr,
            "mean_lr_stderr": self.mean_lr_stderr,
            "metadata": dict(self.metadata),
        }


def bayes_risk(problem: LrProblem, replications: int, master_seed: int) -> BayesRiskResult:
    """Monte Carlo estimate of the Bayes risk 1 - E0[|L - 1|]/2.

    Only null samples are needed.  mean_lr tracks E0[L], which is exactly 1
    for a valid problem and is reported with its own standard error as a
    built-in martingale check.
    """
    if replications < 2:
        raise ValidationError(f"need at least 2 replications, got {replications}")
    devs = np.empty(replications)
    lrs = np.empty(replications)
    for i in range(replications):
        g = sample_null(problem.model, derive_seed(master_seed, "lr-null", i))
        lr = likelihood_ratio_average(problem, g).value
        lrs[i] = lr
        devs[i] = abs(lr - 1.0)
    risk = 1.0 - float(devs.mean()) / 2.0
    stderr = float(devs.std(ddof=1) / (2.0 * math.sqrt(replications)))
    return BayesRiskResult(
        risk=risk,
        stderr=stderr,
        replications=replications,
        mode=problem.mode,
        communities=problem._bundle["communities"].shape[0],
        mean_lr=float(lrs.mean()),
        mean_lr_stderr=float(lrs.std(ddof=1) / math.sqrt(replications)),
        metadata={"master_seed": master_seed},
    )
