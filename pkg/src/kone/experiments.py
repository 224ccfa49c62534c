"""Desk-scale numerical studies: random-pair statistics, shifted-family
bisection brackets, the Boolean 3x3 sweep, and the conic-polytope application
check.  Every definitive verdict entering a summary has a verified certificate.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .algorithms import (
    ConeFound,
    Inconclusive,
    MatrixFamily,
    MinimalConeFound,
    NoInvariantCone,
    Outcome,
    irreducibility_check,
    minimal_cone,
    polyhedral_cone,
    primal_dual,
    verify_certificate,
)
from .cone import ConicPolytope, GeneratorCone, membership, polytope_membership
from .linalg import DEFAULT_TOL, Tolerances, leading_eigenpair

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "StudySummary",
    "BracketResult",
    "BracketFailure",
    "InvarianceFailed",
    "PreconditionViolated",
    "random_pair_study",
    "lambda_sweep",
    "boolean_sweep",
    "application_check",
    "summary_to_csv",
    "summary_to_json",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Reproducible experiment settings; identical configs replay identically."""

    dim: int = 3
    trials: int = 200
    seed: int = 0
    entry_distribution: str = "normal"  # "normal" | "uniform" | "boolean"
    t_scale: float = 1.5
    t_ladder: tuple[float, ...] = (1.1, 2.0)  # retries after t_scale
    t_rescue: tuple[float, ...] = (1.02, 1.05, 1.2, 4.0)  # last-resort scales
    primal_dual_budget: int = 12
    primal_dual_retry: int = 60
    polyhedral_budget: int = 150
    word_budget: int = 240
    dual_warmup: int | None = None
    bisect_iters: int = 10
    require_mean_init: bool = True
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.entry_distribution not in ("normal", "uniform", "boolean"):
            raise ValueError(f"unknown distribution {self.entry_distribution!r}")


@dataclass(frozen=True)
class TrialRecord:
    verdict: str  # "no_cone" | "cone" | "unknown"
    generator_count: int
    words_used: int
    wall_time: float


@dataclass(frozen=True)
class StudySummary:
    dim: int
    trials: int
    no_cone: int
    cone: int
    unknown: int
    records: tuple[TrialRecord, ...]
    metadata: dict

    @property
    def fractions(self) -> dict:
        n = self.trials
        return {
            "no_cone": self.no_cone / n,
            "cone": self.cone / n,
            "unknown": self.unknown / n,
        }


class BracketFailure(RuntimeError):
    """No certified feasible/infeasible endpoints could be established."""


class InvarianceFailed(AssertionError):
    """A base point's image left the conic polytope."""

    def __init__(self, matrix_index: int, point):
        super().__init__(
            f"matrix {matrix_index + 1} maps base point {np.asarray(point)} outside"
        )
        self.matrix_index = matrix_index
        self.point = np.asarray(point)


class PreconditionViolated(ValueError):
    """The candidate base points do not sit inside the cone."""


def _sample_matrix(rng: np.random.Generator, cfg: ExperimentConfig) -> np.ndarray:
    d = cfg.dim
    if cfg.entry_distribution == "normal":
        return rng.standard_normal((d, d))
    if cfg.entry_distribution == "uniform":
        return rng.uniform(0.0, 1.0, (d, d))
    return rng.integers(0, 2, (d, d)).astype(float)


def _mean_initializable(family: MatrixFamily, tol: Tolerances) -> bool:
    pd = leading_eigenpair(family.mean, tol)
    pdt = leading_eigenpair(family.mean.T, tol)
    return (
        pd is not None
        and pdt is not None
        and pd.geometric_simple
        and pdt.geometric_simple
        and abs(float(pdt.right_vector @ pd.right_vector)) > tol.sign_eps
    )


def _sample_pair(rng: np.random.Generator, cfg: ExperimentConfig) -> MatrixFamily:
    """Pair with leading nonnegative eigenvalues on both members; optionally
    also requires the mean to admit the primal-dual initialization."""
    tol = cfg.tolerances
    while True:
        A = _sample_matrix(rng, cfg)
        B = _sample_matrix(rng, cfg)
        if leading_eigenpair(A, tol) is None or leading_eigenpair(B, tol) is None:
            continue
        family = MatrixFamily.from_arrays([A, B])
        if cfg.require_mean_init and not _mean_initializable(family, tol):
            continue
        return family


def solve_pair(family: MatrixFamily, cfg: ExperimentConfig) -> tuple[str, Outcome, int]:
    """Disprove first, then construct, then escalate both.

    Returns (verdict, outcome, generators).  Only verdicts whose certificates
    re-verify are reported; anything else is "unknown"."""
    tol = cfg.tolerances
    irr = irreducibility_check(family, tol)

    def certified(out) -> tuple[str, Outcome, int] | None:
        if isinstance(out, NoInvariantCone):
            verify_certificate(family, out, tol)
            return "no_cone", out, 0
        if isinstance(out, ConeFound):
            verify_certificate(family, out, tol)
            return "cone", out, out.cone.n_generators
        return None

    out = primal_dual(family, budget=cfg.primal_dual_budget, tol=tol, irreducibility=irr)
    hit = certified(out)
    if hit:
        return hit
    for t in (cfg.t_scale, *cfg.t_ladder):
        run = polyhedral_cone(
            family, t=t, budget=cfg.polyhedral_budget, tol=tol, irreducibility=irr
        )
        hit = certified(run.outcome)
        if hit:
            return hit
    # escalation: slow disproofs, then stubborn constructions at gentler scales
    out = primal_dual(family, budget=cfg.primal_dual_retry, tol=tol, irreducibility=irr)
    hit = certified(out)
    if hit:
        return hit
    for t in cfg.t_rescue:
        run = polyhedral_cone(
            family, t=t, budget=2 * cfg.polyhedral_budget, tol=tol, irreducibility=irr
        )
        hit = certified(run.outcome)
        if hit:
            return hit
    return "unknown", out, 0


def random_pair_study(cfg: ExperimentConfig) -> StudySummary:
    """Constructive cone decision statistics over random matrix pairs."""
    if cfg.entry_distribution != "normal":
        raise ValueError("the random-pair study uses normally distributed entries")
    rng = np.random.default_rng(cfg.seed)
    counts = {"no_cone": 0, "cone": 0, "unknown": 0}
    records = []
    for _ in range(cfg.trials):
        family = _sample_pair(rng, cfg)
        t0 = time.perf_counter()
        verdict, _, gens = solve_pair(family, cfg)
        counts[verdict] += 1
        records.append(
            TrialRecord(
                verdict=verdict,
                generator_count=gens,
                words_used=0,
                wall_time=time.perf_counter() - t0,
            )
        )
    return StudySummary(
        dim=cfg.dim,
        trials=cfg.trials,
        no_cone=counts["no_cone"],
        cone=counts["cone"],
        unknown=counts["unknown"],
        records=tuple(records),
        metadata=_metadata(cfg),
    )


@dataclass(frozen=True)
class BracketResult:
    lambda_minus: float
    lambda_plus: float
    records: tuple[dict, ...]

    @property
    def width(self) -> float:
        return self.lambda_plus - self.lambda_minus


def _shifted(family: MatrixFamily, lam: float) -> MatrixFamily:
    d = family.dim
    return MatrixFamily.from_arrays([A - lam * np.eye(d) for A in family.matrices])


def lambda_sweep(cfg: ExperimentConfig, family: MatrixFamily | None = None) -> BracketResult:
    """Certified bisection bracket for the largest shift keeping a cone.

    For the family {A_i - lambda I}, a verified construction certifies
    feasibility (lower bound) and a verified disproof certifies infeasibility
    (upper bound); unknown probes shrink neither side.
    """
    if family is None:
        if cfg.entry_distribution != "uniform":
            raise ValueError("the shift sweep samples uniform [0, 1) entries")
        rng = np.random.default_rng(cfg.seed)
        family = MatrixFamily.from_arrays(
            [_sample_matrix(rng, cfg), _sample_matrix(rng, cfg)]
        )
    records = []

    def probe(lam: float) -> str:
        verdict, _, gens = solve_pair(_shifted(family, lam), cfg)
        records.append({"lambda": lam, "verdict": verdict, "generators": gens})
        return verdict

    lo = 0.0
    if probe(lo) != "cone":
        raise BracketFailure("no certified cone at shift 0")
    hi = 1.0
    for _ in range(12):
        v = probe(hi)
        if v == "no_cone":
            break
        if v == "cone":
            lo = hi
        hi *= 2.0
    else:
        raise BracketFailure("no certified infeasible shift found")
    for _ in range(cfg.bisect_iters):
        mid0 = 0.5 * (lo + hi)
        moved = False
        for frac in (0.5, 0.382, 0.618, 0.25, 0.75):
            mid = lo + frac * (hi - lo)
            v = probe(mid)
            if v == "cone":
                lo = mid
                moved = True
                break
            if v == "no_cone":
                hi = mid
                moved = True
                break
        if not moved:
            records.append({"lambda": mid0, "verdict": "bisection_stalled"})
            break
    return BracketResult(lambda_minus=lo, lambda_plus=hi, records=tuple(records))


def boolean_sweep(cfg: ExperimentConfig) -> StudySummary:
    """Minimal-cone construction over sampled 0/1 matrix pairs (d = 3).

    Pairs are drawn without replacement from the full pair space; successes
    are cross-verified invariant cones.
    """
    if cfg.entry_distribution != "boolean" or cfg.dim != 3:
        raise ValueError("the boolean sweep runs on 3x3 pairs with 0/1 entries")
    rng = np.random.default_rng(cfg.seed)
    space = 2 ** 18  # (A, B) encoded in 18 bits
    codes = rng.choice(space, size=min(cfg.trials, space), replace=False)
    counts = {"no_cone": 0, "cone": 0, "unknown": 0}
    records = []
    longest_root: tuple[int, str] | None = None
    tree_counts = []
    for code in codes:
        bits = [(int(code) >> k) & 1 for k in range(18)]
        A = np.array(bits[:9], dtype=float).reshape(3, 3)
        B = np.array(bits[9:], dtype=float).reshape(3, 3)
        family = MatrixFamily.from_arrays([A, B])
        t0 = time.perf_counter()
        out = minimal_cone(
            family,
            dual_warmup_iters=cfg.dual_warmup,
            budget_words=cfg.word_budget,
            tol=cfg.tolerances,
        )
        wall = time.perf_counter() - t0
        if isinstance(out, MinimalConeFound):
            verify_certificate(family, out, cfg.tolerances)
            counts["cone"] += 1
            tree_counts.append(len(out.trees))
            if out.trees:
                first = out.trees[0]
                if longest_root is None or len(first.word) > longest_root[0]:
                    longest_root = (len(first.word), str(first.word))
            records.append(
                TrialRecord("cone", out.cone.n_generators, 0, wall)
            )
        elif isinstance(out, NoInvariantCone):
            verify_certificate(family, out, cfg.tolerances)
            counts["no_cone"] += 1
            records.append(TrialRecord("no_cone", 0, 0, wall))
        else:
            counts["unknown"] += 1
            records.append(TrialRecord("unknown", 0, out.iterations_used, wall))
    meta = _metadata(cfg)
    meta["success_rate"] = counts["cone"] / len(codes)
    meta["max_trees"] = max(tree_counts) if tree_counts else 0
    meta["longest_first_root"] = longest_root
    return StudySummary(
        dim=3,
        trials=len(codes),
        no_cone=counts["no_cone"],
        cone=counts["cone"],
        unknown=counts["unknown"],
        records=tuple(records),
        metadata=meta,
    )


def application_check(
    family: MatrixFamily,
    base_points,
    cone: GeneratorCone,
    tol: Tolerances = DEFAULT_TOL,
) -> dict:
    """Verify invariance of the conic polytope co(S) + K and report the
    consequences: products cannot shrink, so the family is not mortal and the
    associated switching system is not stabilisable.

    This is a verifier only; it does not search for the base points.
    """
    S = np.atleast_2d(np.asarray(base_points, dtype=float))
    for s in S:
        if float(np.linalg.norm(s)) < 1e-300 or not membership(s, cone, "boundary", tol):
            raise PreconditionViolated(
                f"base point {s} is not a nonzero element of the cone"
            )
    for g in cone.generators:
        if membership(-g, cone, "boundary", tol):
            raise PreconditionViolated("the recession cone is not pointed")
    polytope = ConicPolytope(base_points=S, recession=cone)
    for i, A in enumerate(family.matrices):
        for g in cone.generators:
            if not membership(A @ g, cone, "boundary", tol):
                raise InvarianceFailed(i, g)
        for s in S:
            if not polytope_membership(A @ s, polytope, tol):
                raise InvarianceFailed(i, s)
    return {
        "invariant": True,
        "lower_spectral_radius_at_least_one": True,
        "mortal": False,
        "stabilisable": False,
    }


def _metadata(cfg: ExperimentConfig) -> dict:
    meta = asdict(cfg)
    meta["tolerances"] = asdict(cfg.tolerances)
    meta["sampling"] = (
        f"{cfg.entry_distribution} entries; pairs filtered to members with "
        "leading nonnegative eigenvalues"
        + ("; mean must admit the primal-dual initialization" if cfg.require_mean_init else "")
    )
    return meta


def summary_to_csv(summary: StudySummary, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dim", "tests", "no_cone", "cone", "unknown"])
        writer.writerow(
            [summary.dim, summary.trials, summary.no_cone, summary.cone, summary.unknown]
        )


def summary_to_json(summary: StudySummary, path) -> None:
    payload = {
        "dim": summary.dim,
        "tests": summary.trials,
        "no_cone": summary.no_cone,
        "cone": summary.cone,
        "unknown": summary.unknown,
        "fractions": summary.fractions,
        "metadata": summary.metadata,
        "records": [asdict(r) for r in summary.records],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, default=str)
