"""Decision and construction algorithms for common invariant cones, with
machine-checkable certificates for every definitive verdict.

Four procedures are provided:

* ``direct_algorithm``  -- grows the conic hull of a seed eigenvector under the
  family action; terminates only on degenerate families or disproofs.
* ``primal_dual``       -- runs the growth on the family and its transposes
  simultaneously and stops at the first obtuse pairing, which disproves the
  existence of an invariant cone.
* ``polyhedral_cone``   -- same growth after an eigenvector-aligning basis
  change and an axis scaling by t > 1; termination yields an invariant cone.
* ``minimal_cone``      -- assembles the minimal invariant cone from the
  eigenvector cycles of canonically enumerated products, when it is polyhedral.

Every NoInvariantCone / ConeFound / MinimalConeFound outcome carries a
certificate that ``verify_certificate`` re-checks from scratch.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .cone import (
    GeneratorCone,
    HalfspaceCone,
    ScalingContext,
    UndefinedConeNorm,
    add_ray,
    cone_norm,
    is_full_space,
    membership,
)
from .linalg import (
    DEFAULT_TOL,
    NonPositivePairing,
    Tolerances,
    build_alignment,
    leading_eigenpair,
    mean_matrix,
    orthonormal_completion,
)
from .lp import equality_feasibility, solve_lp
from .words import (
    NonSimpleRoot,
    NoPerronInProduct,
    Word,
    ZeroCycle,
    cyclic_root,
    enumerate_words,
    product_of_word,
)

logger = logging.getLogger("kone.algorithms")

__all__ = [
    "MatrixFamily",
    "IrreducibilityReport",
    "NoInvariantCone",
    "ConeFound",
    "MinimalConeFound",
    "Inconclusive",
    "Outcome",
    "NegativePairing",
    "PairWitness",
    "PerronBreakdown",
    "SimplexCover",
    "InvarianceProof",
    "Certificate",
    "CyclicTree",
    "DirectRun",
    "PolyhedralRun",
    "VerificationFailed",
    "irreducibility_check",
    "direct_algorithm",
    "primal_dual",
    "polyhedral_cone",
    "minimal_cone",
    "maximal_cone",
    "verify_certificate",
]


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True, eq=False)
class MatrixFamily:
    """Finite family of real square matrices together with its mean."""

    matrices: tuple[np.ndarray, ...]
    mean: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if len(self.matrices) == 0:
            raise ValueError("a family needs at least one matrix")
        mats = []
        d = None
        for M in self.matrices:
            M = np.ascontiguousarray(M, dtype=float)
            if M.ndim != 2 or M.shape[0] != M.shape[1]:
                raise ValueError("family members must be square matrices")
            if d is None:
                d = M.shape[0]
            elif M.shape[0] != d:
                raise ValueError("family members must share one dimension")
            if not np.all(np.isfinite(M)):
                raise ValueError("matrix entries must be finite")
            M.setflags(write=False)
            mats.append(M)
        object.__setattr__(self, "matrices", tuple(mats))
        mean = mean_matrix(mats)
        mean.setflags(write=False)
        object.__setattr__(self, "mean", mean)

    @classmethod
    def from_arrays(cls, arrays) -> "MatrixFamily":
        return cls(tuple(np.asarray(a, dtype=float) for a in arrays))

    @property
    def m(self) -> int:
        return len(self.matrices)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    def transposed(self) -> "MatrixFamily":
        return MatrixFamily(tuple(M.T.copy() for M in self.matrices))


@dataclass(frozen=True)
class IrreducibilityReport:
    status: str  # "irreducible" | "undetermined"
    algebra_dim: int


def irreducibility_check(
    family: MatrixFamily, tol: Tolerances = DEFAULT_TOL
) -> IrreducibilityReport:
    """Sufficient irreducibility test via the generated matrix algebra.

    Grows the linear span of the identity and all products until it
    stabilizes; a span of full dimension d^2 rules out a common nontrivial
    invariant subspace.  Anything less is reported as undetermined (the
    family may still be irreducible over the reals, e.g. plane rotations).
    """
    d = family.dim
    target = d * d
    basis = np.zeros((0, target))

    def try_add(M: np.ndarray) -> bool:
        nonlocal basis
        flat = M.ravel()
        resid = flat - basis.T @ (basis @ flat) if basis.shape[0] else flat.copy()
        nr = float(np.linalg.norm(resid))
        if nr <= 1e-10 * max(float(np.linalg.norm(flat)), 1.0):
            return False
        basis = np.vstack([basis, resid / nr])
        return True

    frontier = [np.eye(d)]
    try_add(frontier[0])
    while frontier and basis.shape[0] < target:
        nxt = []
        for P in frontier:
            for A in family.matrices:
                Q = A @ P
                if try_add(Q):
                    nxt.append(Q)
        frontier = nxt
    dim = int(basis.shape[0])
    status = "irreducible" if dim == target else "undetermined"
    return IrreducibilityReport(status=status, algebra_dim=dim)


# ---------------------------------------------------------------------------
# certificates and outcomes


@dataclass(frozen=True)
class PairWitness:
    """One obtuse pairing: a dual-orbit vector against a cycle descendant."""

    dual_word: tuple[int, ...]
    cycle_index: int
    image_word: tuple[int, ...]
    value: float


@dataclass(frozen=True, eq=False)
class NegativePairing:
    """Two orbit vectors (one primal, one dual) forming an obtuse angle.

    Orbit form (``cycle_word`` empty): the primal vector is ``primal_word``
    applied to the right mean eigenvector, the dual vector is ``dual_word``
    applied (through transposes) to the left one, both under the gauge
    (v*, v) > 0.  Cycle form: the primal side descends from the eigenvector
    cycle of ``cycle_word``; ``plus``/``minus`` witness both cycle
    orientations, which is what makes the disproof orientation-free.
    """

    value: float
    primal_word: tuple[int, ...] = ()
    dual_word: tuple[int, ...] = ()
    cycle_word: tuple[int, ...] = ()
    plus: PairWitness | None = None
    minus: PairWitness | None = None


@dataclass(frozen=True)
class PerronBreakdown:
    """A matrix that every cone-sharing family must equip with a simple
    leading eigenpair fails to have one.

    kind "combination": the matrix is sum(weights[i] * A_i); any failure
    (missing or non-simple leading pair, or orthogonal left/right pairing)
    disproves an invariant cone for irreducible families.  kind "product":
    the matrix is the product along ``word``; only a missing leading
    nonnegative eigenvalue is disproving, and needs no irreducibility.
    """

    kind: str  # "combination" | "product"
    reason: str  # "no_perron" | "not_simple" | "orthogonal_pairing"
    weights: tuple[float, ...] = ()
    word: tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class SimplexCover:
    """Orbit points whose convex hull covers the origin, so no pointed cone
    can contain the orbit.  Each point is reproduced by applying its word to
    the recorded seed."""

    words: tuple[tuple[int, ...], ...]
    points: np.ndarray
    seed_kind: str  # "combination" | "product" | "explicit"
    seed_weights: tuple[float, ...] = ()
    seed_word: tuple[int, ...] = ()
    seed_vector: np.ndarray | None = None
    transposed: bool = False

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.points, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "points", p)
        if self.seed_vector is not None:
            v = np.ascontiguousarray(self.seed_vector, dtype=float)
            v.setflags(write=False)
            object.__setattr__(self, "seed_vector", v)


@dataclass(frozen=True, eq=False)
class InvarianceProof:
    """Marker that the returned cone absorbs every generator image; verified
    by re-solving one membership program per (matrix, generator) pair."""

    margins: tuple[float, ...] = ()


Certificate = Union[NegativePairing, PerronBreakdown, SimplexCover, InvarianceProof]


@dataclass(frozen=True, eq=False)
class CyclicTree:
    """Vectors contributed by one product's eigenvector cycle that survive as
    extreme rays of the minimal cone."""

    word: Word
    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.vectors, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)


@dataclass(frozen=True, eq=False)
class NoInvariantCone:
    witness: Certificate
    verdict: str = field(default="no_invariant_cone", init=False)


@dataclass(frozen=True, eq=False)
class ConeFound:
    cone: GeneratorCone
    center: np.ndarray
    certificate: Certificate
    verdict: str = field(default="cone_found", init=False)


@dataclass(frozen=True, eq=False)
class MinimalConeFound:
    cone: GeneratorCone
    trees: tuple[CyclicTree, ...]
    certificate: Certificate
    verdict: str = field(default="minimal_cone_found", init=False)


@dataclass(frozen=True)
class Inconclusive:
    iterations_used: int
    reason: str
    verdict: str = field(default="inconclusive", init=False)


Outcome = Union[NoInvariantCone, ConeFound, MinimalConeFound, Inconclusive]


class VerificationFailed(AssertionError):
    """A certificate failed its independent recomputation."""


def _maybe_no_cone(
    cert: Certificate, irr: IrreducibilityReport, iterations: int, hint: str
) -> Outcome:
    """NoInvariantCone when irreducibility is established; otherwise the
    disproof theorems do not apply and the verdict is downgraded."""
    if irr.status == "irreducible":
        return NoInvariantCone(witness=cert)
    return Inconclusive(
        iterations_used=iterations,
        reason=f"warning: {hint}, but irreducibility is undetermined "
        f"(algebra dimension {irr.algebra_dim}); no-cone cannot be certified",
    )


# ---------------------------------------------------------------------------
# shared orbit-growth engine


class _OrbitState:
    """Generators grown from a seed, with the word that produced each one."""

    def __init__(self, seed: np.ndarray, tol: Tolerances):
        self.cone = GeneratorCone.from_rays([seed], tol)
        self.words: list[tuple[int, ...]] = [()]
        self.frontier: list[int] = [0]

    def grow_round(self, matrices, tol: Tolerances, mode: str = "boundary") -> list[int]:
        """One round: test all frontier images against the round-start cone,
        fold the outsiders, and make them the next frontier."""
        snapshot = self.cone
        new_idx: list[int] = []
        for idx in self.frontier:
            g = self.cone.generators[idx]
            base = self.words[idx]
            for i, A in enumerate(matrices):
                x = A @ g
                if float(np.linalg.norm(x)) < 1e-300:
                    continue
                if membership(x, snapshot, mode, tol):
                    continue
                before = self.cone.n_generators
                self.cone = add_ray(self.cone, x, tol)
                if self.cone.n_generators > before:
                    self.words.append(base + (i + 1,))
                    new_idx.append(before)
        self.frontier = new_idx
        return new_idx


def _apply_word(letters, matrices, v: np.ndarray) -> np.ndarray:
    x = v
    for letter in letters:
        x = matrices[letter - 1] @ x
    return x


def _simplex_cover(
    state: _OrbitState, seed_spec: tuple, tol: Tolerances, transposed: bool
) -> SimplexCover | None:
    """Extract a basic solution of {sum b_i g_i = 0, sum b_i = 1, b >= 0};
    its support (at most dim+1 generators) is the covering witness."""
    G = state.cone.generators
    n, d = G.shape
    A = np.vstack([G.T, np.ones((1, n))])
    b = np.concatenate([np.zeros(d), [1.0]])
    res = solve_lp(A, b, np.zeros(n), feas_tol=tol.lp_feas)
    if res.status != "optimal":
        return None
    support = np.flatnonzero(res.x > 1e-12)
    kind, payload = seed_spec
    kwargs = {}
    if kind == "combination":
        kwargs["seed_weights"] = tuple(float(w) for w in payload)
    elif kind == "product":
        kwargs["seed_word"] = tuple(payload)
    else:
        kwargs["seed_vector"] = np.asarray(payload, dtype=float)
    return SimplexCover(
        words=tuple(state.words[i] for i in support),
        points=G[support],
        seed_kind=kind,
        transposed=transposed,
        **kwargs,
    )


# ---------------------------------------------------------------------------
# direct algorithm


@dataclass(frozen=True, eq=False)
class DirectRun:
    outcome: Outcome
    cones: tuple[GeneratorCone, ...]  # hull after each round, including round 0


def _auto_seed(family: MatrixFamily, tol: Tolerances, rng) -> tuple[np.ndarray, tuple] | None:
    """Simple leading eigenvector of the mean, of a random positive
    combination, or of a short product: up to 20 attempts."""
    m = family.m
    attempts: list[tuple] = [("combination", (1.0 / m,) * m)]
    rng = np.random.default_rng(rng)
    attempts += [("combination", tuple(rng.uniform(0.25, 1.75, size=m))) for _ in range(9)]
    idx = 1
    while len(attempts) < 20:
        w = enumerate_words(m, idx)
        if w is None:
            break
        attempts.append(("product", w.letters))
        idx += 1
    for kind, payload in attempts:
        if kind == "combination":
            M = sum(wi * Ai for wi, Ai in zip(payload, family.matrices))
        else:
            M = product_of_word(payload, family.matrices)
        pd = leading_eigenpair(M, tol)
        if pd is not None and pd.simple:
            return pd.right_vector, (kind, payload)
    return None


def direct_algorithm(
    family: MatrixFamily,
    seed_vector=None,
    budget: int = 50,
    tol: Tolerances = DEFAULT_TOL,
    rng=0,
    irreducibility: IrreducibilityReport | None = None,
) -> DirectRun:
    """Grow the conic hull of a seed eigenvector under the family action.

    If the hull fills the space, no invariant cone exists (covering
    certificate); if a round adds nothing, the hull is invariant.  For
    nonsingular families seeded inside the minimal cone neither happens, so
    budget exhaustion is the expected outcome.  An explicit ``seed_vector``
    is trusted to be a simple leading eigenvector of some product or positive
    combination of the family.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    irr = irreducibility or irreducibility_check(family, tol)
    if seed_vector is not None:
        seed = np.asarray(seed_vector, dtype=float)
        seed_spec: tuple = ("explicit", seed.copy())
    else:
        found = _auto_seed(family, tol, rng)
        if found is None:
            m = family.m
            empty = (GeneratorCone.empty(family.dim),)
            pd_mean = leading_eigenpair(family.mean, tol)
            pd_mean_t = leading_eigenpair(family.mean.T, tol)
            if pd_mean is None or pd_mean_t is None:
                cert = PerronBreakdown(
                    kind="combination", reason="no_perron", weights=(1.0 / m,) * m
                )
            elif not (pd_mean.geometric_simple and pd_mean_t.geometric_simple):
                cert = PerronBreakdown(
                    kind="combination", reason="not_simple", weights=(1.0 / m,) * m
                )
            else:
                # the mean has a proper eigenpair but nothing dominant to seed
                # the growth with; not a disproof
                return DirectRun(
                    Inconclusive(0, "no dominant simple seed eigenvector found"), empty
                )
            outcome = _maybe_no_cone(
                cert, irr, 0, "no simple leading eigenvector exists to seed the growth"
            )
            return DirectRun(outcome, empty)
        seed, seed_spec = found
    state = _OrbitState(seed, tol)
    cones = [state.cone]
    for j in range(1, budget + 1):
        new_idx = state.grow_round(family.matrices, tol, "boundary")
        cones.append(state.cone)
        if is_full_space(state.cone, tol):
            cover = _simplex_cover(state, seed_spec, tol, transposed=False)
            if cover is None:
                return DirectRun(
                    Inconclusive(j, "hull filled the space but no covering witness "
                                    "could be extracted"),
                    tuple(cones),
                )
            outcome = _maybe_no_cone(cover, irr, j, "the orbit hull fills the space")
            return DirectRun(outcome, tuple(cones))
        if not new_idx:
            out = ConeFound(
                cone=state.cone,
                center=seed / np.linalg.norm(seed),
                certificate=InvarianceProof(),
            )
            return DirectRun(out, tuple(cones))
    return DirectRun(
        Inconclusive(budget, "growth budget exhausted without stabilizing "
                             "(expected for nonsingular families)"),
        tuple(cones),
    )


# ---------------------------------------------------------------------------
# primal-dual disprover


def _mean_eigen_pair(family: MatrixFamily, tol: Tolerances):
    """Right/left leading eigenvectors of the mean, oriented and scaled so
    (v*, v) = 1.  Returns (v, v*) or a PerronBreakdown certificate."""
    m = family.m
    weights = (1.0 / m,) * m
    pd_r = leading_eigenpair(family.mean, tol)
    pd_l = leading_eigenpair(family.mean.T, tol)
    if pd_r is None or pd_l is None:
        return None, PerronBreakdown("combination", "no_perron", weights=weights)
    if not (pd_r.geometric_simple and pd_l.geometric_simple):
        return None, PerronBreakdown("combination", "not_simple", weights=weights)
    v = pd_r.right_vector
    vs = pd_l.right_vector
    s = float(vs @ v)
    if abs(s) <= tol.sign_eps:
        return None, PerronBreakdown("combination", "orthogonal_pairing", weights=weights)
    if s < 0:
        vs = -vs
    vs = vs / float(vs @ v)
    return (v, vs), None


def primal_dual(
    family: MatrixFamily,
    budget: int = 50,
    tol: Tolerances = DEFAULT_TOL,
    irreducibility: IrreducibilityReport | None = None,
) -> Outcome:
    """Disprove the existence of a common invariant cone.

    Runs the orbit growth on the family and on its transposes from the mean's
    right/left leading eigenvectors and stops at the first obtuse pairing
    between the two orbits.  Halting this way is equivalent to non-existence
    for irreducible families; when a cone exists the loop cannot halt and the
    call returns Inconclusive.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    irr = irreducibility or irreducibility_check(family, tol)
    pair, cert = _mean_eigen_pair(family, tol)
    if pair is None:
        return _maybe_no_cone(
            cert, irr, 0, "the mean matrix lacks an oriented simple leading eigenpair"
        )
    v, vs = pair
    m = family.m
    mats = family.matrices
    mats_t = tuple(M.T for M in mats)
    primal = _OrbitState(v, tol)
    dual = _OrbitState(vs, tol)
    seed_spec = ("combination", (1.0 / m,) * m)
    for j in range(1, budget + 1):
        new_p = primal.grow_round(mats, tol, "boundary")
        new_d = dual.grow_round(mats_t, tol, "boundary")
        for state, transposed in ((primal, False), (dual, True)):
            if is_full_space(state.cone, tol):
                cover = _simplex_cover(state, seed_spec, tol, transposed)
                if cover is not None:
                    side = "transposed " if transposed else ""
                    return _maybe_no_cone(
                        cover, irr, j, f"the {side}orbit hull fills the space"
                    )
        worst = None  # (value, primal_word, dual_word)
        P = primal.cone.generators
        D = dual.cone.generators
        if new_p:
            M = D @ P[new_p].T
            k = np.unravel_index(np.argmin(M), M.shape)
            if worst is None or M[k] < worst[0]:
                worst = (float(M[k]), primal.words[new_p[k[1]]], dual.words[k[0]])
        if new_d:
            M = D[new_d] @ P.T
            k = np.unravel_index(np.argmin(M), M.shape)
            if worst is None or M[k] < worst[0]:
                worst = (float(M[k]), primal.words[k[1]], dual.words[new_d[k[0]]])
        if worst is not None and worst[0] < -tol.sign_eps:
            cert = NegativePairing(
                value=worst[0], primal_word=worst[1], dual_word=worst[2]
            )
            return _maybe_no_cone(cert, irr, j, "an obtuse primal/dual pairing exists")
        if not new_p and not new_d:
            return Inconclusive(
                j,
                "both orbit frontiers stalled with all pairings nonnegative; "
                "the family most likely has an invariant cone",
            )
    return Inconclusive(budget, "pairing budget exhausted without a negative sign")


# ---------------------------------------------------------------------------
# polyhedral construction


@dataclass(frozen=True, eq=False)
class PolyhedralRun:
    outcome: Outcome
    scaled_cones: tuple[GeneratorCone, ...]  # hull per round, aligned coordinates
    context: ScalingContext | None


def polyhedral_cone(
    family: MatrixFamily,
    t: float = 1.5,
    budget: int = 200,
    tol: Tolerances = DEFAULT_TOL,
    generator_cap: int = 20000,
    irreducibility: IrreducibilityReport | None = None,
) -> PolyhedralRun:
    """Construct an invariant cone by axis-scaled orbit growth.

    After a basis change that makes the mean's left and right leading
    eigenvectors coincide (center c), the family is scaled by the operator
    that dilates c-orthogonals by t.  Images whose cone-gauge exceeds 1 are
    folded in; once the round maximum drops to t or below, a full sweep
    checks that every generator image has gauge at most t, which certifies
    invariance of the unscaled cone.  With t = 1 the procedure reduces to the
    plain growth of ``direct_algorithm`` in aligned coordinates (and then
    normally never terminates).
    """
    if t < 1.0:
        raise ValueError("scale factor t must be at least 1")
    if budget < 1:
        raise ValueError("budget must be at least 1")
    irr = irreducibility or irreducibility_check(family, tol)
    pair, cert = _mean_eigen_pair(family, tol)
    if pair is None:
        return PolyhedralRun(
            _maybe_no_cone(
                cert, irr, 0, "the mean matrix lacks an oriented simple leading eigenpair"
            ),
            (),
            None,
        )
    v, vs = pair
    try:
        _, V, c = build_alignment(v, vs, kappa=1.0, tol=tol)
    except NonPositivePairing:
        cert = PerronBreakdown(
            "combination", "orthogonal_pairing", weights=(1.0 / family.m,) * family.m
        )
        return PolyhedralRun(
            _maybe_no_cone(cert, irr, 0, "left/right eigenvectors pair non-positively"),
            (),
            None,
        )
    ctx = ScalingContext(
        c=c, C=orthonormal_completion(c), t=float(t), V=V, V_inv=np.linalg.inv(V)
    )
    scaled = [ctx.matrix() @ (ctx.V_inv @ A @ ctx.V) for A in family.matrices]
    hull = GeneratorCone.from_rays([c], tol)
    frontier = [0]
    cones = [hull]
    add_slack = 1.0 + 10.0 * tol.lp_feas

    def inconclusive(j, reason):
        return PolyhedralRun(Inconclusive(j, reason), tuple(cones), ctx)

    for j in range(1, budget + 1):
        snapshot = hull
        round_max = 0.0
        additions: list[int] = []
        for idx in frontier:
            g = hull.generators[idx]
            for As in scaled:
                x = As @ g
                try:
                    nx = cone_norm(x, snapshot, ctx, tol)
                except UndefinedConeNorm:
                    return inconclusive(
                        j,
                        "a scaled image left the halfspace around the center; "
                        "retry with a smaller t",
                    )
                round_max = max(round_max, nx)
                if nx > add_slack:
                    before = hull.n_generators
                    hull = add_ray(hull, x, tol)
                    if hull.n_generators > before:
                        additions.append(before)
        cones.append(hull)
        if hull.n_generators > generator_cap:
            return inconclusive(j, f"generator cap {generator_cap} exceeded")
        if is_full_space(hull, tol):
            return inconclusive(
                j,
                "the scaled hull filled the space: no invariant cone at this t "
                "(a smaller t may still succeed)",
            )
        if round_max <= t:
            # mandatory full sweep: every generator image must have gauge <= t
            margins = []
            violators: list[np.ndarray] = []
            for g in hull.generators:
                for As in scaled:
                    x = As @ g
                    try:
                        nx = cone_norm(x, hull, ctx, tol)
                    except UndefinedConeNorm:
                        return inconclusive(
                            j, "a scaled image left the halfspace during verification"
                        )
                    margins.append(nx)
                    if nx > t * (1.0 + 1e-9):
                        violators.append(x)
            if not violators:
                out_rays = hull.generators @ ctx.V.T
                out_cone = GeneratorCone.from_rays(out_rays, tol)
                center = ctx.V @ c
                center = center / np.linalg.norm(center)
                out = ConeFound(
                    cone=out_cone,
                    center=center,
                    certificate=InvarianceProof(margins=tuple(margins)),
                )
                return PolyhedralRun(out, tuple(cones), ctx)
            for x in violators:
                before = hull.n_generators
                hull = add_ray(hull, x, tol)
                if hull.n_generators > before:
                    additions.append(before)
            cones[-1] = hull
        if not additions:
            return inconclusive(j, "growth stalled without certifying invariance")
        frontier = additions
    return inconclusive(budget, "construction budget exhausted")


# ---------------------------------------------------------------------------
# minimal cone


@dataclass
class _RootRecord:
    letters: tuple[int, ...]
    sign: float
    flip_value: float  # worst pairing under the opposite orientation
    flip_witness: PairWitness | None
    gen_indices: list[int]


def _dual_warmup(
    family: MatrixFamily,
    v_star: np.ndarray,
    warmup: int,
    tol: Tolerances,
):
    """Grow the transposed-family orbit, aiming for a full-dimensional cone.

    Returns (state, marker) with marker None on full dimension, "full_space"
    when the dual hull covers everything (a disproof), or "degenerate" when
    the orbit span stalls below full dimension.  A degenerate dual cone still
    anchors the cycle orientations, only with weaker disproof power, so
    callers proceed with it."""
    d = family.dim
    mats_t = tuple(M.T for M in family.matrices)
    state = _OrbitState(v_star, tol)
    max_rounds = max(10 * warmup, warmup + 10)
    for j in range(1, max_rounds + 1):
        new_idx = state.grow_round(mats_t, tol, "boundary")
        if is_full_space(state.cone, tol):
            return state, "full_space"
        if j >= warmup and state.cone.span_rank() == d:
            return state, None
        if not new_idx:
            break
    if state.cone.span_rank() == d:
        return state, None
    return state, "degenerate"


def minimal_cone(
    family: MatrixFamily,
    dual_warmup_iters: int | None = None,
    budget_words: int = 240,
    tol: Tolerances = DEFAULT_TOL,
    generator_cap: int = 20000,
    irreducibility: IrreducibilityReport | None = None,
) -> Outcome:
    """Assemble the minimal invariant cone from product eigenvector cycles.

    A full-dimensional dual orbit cone is grown first; every cycle is then
    oriented against it (an obtuse pairing under both orientations disproves
    the cone).  Cycle vectors outside the interior of the current hull are
    retained and one generation of images of all retained vectors is folded
    per word.  The first word round that contributes nothing leaves every
    image of every retained vector absorbed, so the hull is invariant; it is
    reduced to its extreme rays, and the rays are then explained as cycles of
    enumerated products together with their image closures (the reported
    trees), snapping matched rays onto the exact eigenvector chains.
    """
    if budget_words < 1:
        raise ValueError("budget_words must be at least 1")
    d = family.dim
    irr = irreducibility or irreducibility_check(family, tol)
    pair, cert = _mean_eigen_pair(family, tol)
    if pair is None:
        return _maybe_no_cone(
            cert, irr, 0, "the mean matrix lacks an oriented simple leading eigenpair"
        )
    v, vs = pair
    warmup = dual_warmup_iters if dual_warmup_iters is not None else d + 3
    dual_state, marker = _dual_warmup(family, vs, warmup, tol)
    if marker == "full_space":
        cover = _simplex_cover(
            dual_state, ("combination", (1.0 / family.m,) * family.m), tol, True
        )
        if cover is None:
            return Inconclusive(0, "dual hull filled the space but no witness extracted")
        return _maybe_no_cone(cover, irr, 0, "the transposed orbit hull fills the space")
    if marker == "degenerate":
        logger.info(
            "dual orbit cone stalled at rank %d < %d; proceeding with a "
            "degenerate orientation anchor",
            dual_state.cone.span_rank(), d,
        )
    K_star = dual_state.cone.generators
    dual_words = dual_state.words

    mats = family.matrices
    hull = GeneratorCone.empty(d)
    owners: list[int] = []  # root-record index per generator
    provenance: list[tuple[int, tuple[int, ...]]] = []  # (cycle_index, image_word)
    pending: list[int] = []
    roots: list[_RootRecord] = []
    skipped: list[tuple[tuple[int, ...], str]] = []

    def fold(x: np.ndarray, rec_idx: int, cycle_idx: int, image_word: tuple) -> bool:
        nonlocal hull
        before = hull.n_generators
        hull = add_ray(hull, x, tol)
        if hull.n_generators == before:
            return False
        owners.append(rec_idx)
        provenance.append((cycle_idx, image_word))
        roots[rec_idx].gen_indices.append(before)
        pending.append(before)
        return True

    def negative_cert(rec: _RootRecord, gen_idx: int, dual_idx: int, value: float):
        cyc, img = provenance[gen_idx]
        plus = PairWitness(
            dual_word=dual_words[dual_idx], cycle_index=cyc, image_word=img, value=value
        )
        return NegativePairing(
            value=value,
            cycle_word=rec.letters,
            plus=plus,
            minus=rec.flip_witness,
        )

    words_used = 0
    for j in range(1, budget_words + 1):
        word = enumerate_words(family.m, j)
        if word is None:
            break
        words_used = j
        try:
            root = cyclic_root(word, mats, tol)
        except NoPerronInProduct:
            cert = PerronBreakdown("product", "no_perron", word=word.letters)
            return _maybe_no_cone(
                cert, irr, j, f"the product {word} has no leading nonnegative eigenvalue"
            )
        except (NonSimpleRoot, ZeroCycle) as exc:
            skipped.append((word.letters, type(exc).__name__))
            continue
        M = K_star @ root.vectors.T  # (n_dual, cycle_len)
        min_plus = float(M.min())
        min_minus = float((-M).min())
        if min_plus >= min_minus:
            sign, best, other = 1.0, min_plus, min_minus
            flip_arg = np.unravel_index(np.argmin(-M), M.shape)
        else:
            sign, best, other = -1.0, min_minus, min_plus
            flip_arg = np.unravel_index(np.argmin(M), M.shape)
        flip_witness = PairWitness(
            dual_word=dual_words[int(flip_arg[0])],
            cycle_index=int(flip_arg[1]),
            image_word=(),
            value=other,
        )
        if best < -tol.sign_eps:
            # both orientations are obtuse against the dual cone
            arg = np.unravel_index(np.argmin(sign * M), M.shape)
            plus = PairWitness(
                dual_word=dual_words[int(arg[0])],
                cycle_index=int(arg[1]),
                image_word=(),
                value=best,
            )
            cert = NegativePairing(
                value=best, cycle_word=word.letters, plus=plus, minus=flip_witness
            )
            return _maybe_no_cone(
                cert, irr, j, f"the cycle of {word} pairs obtusely with the dual cone"
            )
        vecs = sign * root.vectors
        new_flags = [not membership(x, hull, "boundary", tol) for x in vecs]
        rec = _RootRecord(
            letters=word.letters,
            sign=sign,
            flip_value=other,
            flip_witness=flip_witness if other < -tol.sign_eps else None,
            gen_indices=[],
        )
        rec_idx = len(roots)
        roots.append(rec)
        added = 0
        for k, x in enumerate(vecs):
            if new_flags[k]:
                added += fold(x, rec_idx, k, ())
        # expand everything retained so far by one generation of images
        batch, pending[:] = pending[:], []
        for idx in batch:
            g = hull.generators[idx]
            rec_i = owners[idx]
            cyc, img = provenance[idx]
            for i, A in enumerate(mats):
                x = A @ g
                if float(np.linalg.norm(x)) < 1e-300:
                    continue
                if membership(x, hull, "boundary", tol):
                    continue
                added += fold(x, rec_i, cyc, img + (i + 1,))
        if hull.n_generators > generator_cap:
            return Inconclusive(j, f"generator cap {generator_cap} exceeded")
        # re-check signs of everything added this round (folds always append)
        if added:
            round_new = list(range(hull.n_generators - added, hull.n_generators))
            Mnew = K_star @ hull.generators[round_new].T
            arg = np.unravel_index(np.argmin(Mnew), Mnew.shape)
            worst = float(Mnew[arg])
            if worst < -tol.sign_eps:
                gen_idx = round_new[int(arg[1])]
                owner_rec = roots[owners[gen_idx]]
                if owner_rec.flip_witness is None:
                    return Inconclusive(
                        j,
                        "an orbit vector pairs obtusely with the dual cone but the "
                        "root orientation is ambiguous; cannot certify",
                    )
                cert = negative_cert(owner_rec, gen_idx, int(arg[0]), worst)
                return _maybe_no_cone(
                    cert, irr, j, "an orbit vector pairs obtusely with the dual cone"
                )
        logger.debug(
            "word %d (%s): added=%d gens=%d", j, word, added, hull.n_generators
        )
        if added == 0:
            # nothing new and every pending image absorbed: the hull is
            # invariant up to the dedup threshold; tighten it to lp_feas
            repaired = _repair_invariance(hull, mats, tol)
            if repaired is None:
                return Inconclusive(
                    j, "invariance repair did not converge at the LP tolerance"
                )
            return _finish_minimal(family, repaired, budget_words, j, skipped, tol)
    return Inconclusive(
        words_used,
        f"word budget exhausted ({words_used} products, "
        f"{hull.n_generators} generators, {len(skipped)} skipped roots); "
        "the minimal cone may not be polyhedral",
    )


def _repair_invariance(
    hull: GeneratorCone, mats, tol: Tolerances, cap: int = 2000
) -> GeneratorCone | None:
    """Fold in any generator image that misses the hull at the LP tolerance.

    Ray merging leaves images absorbed only up to the dedup angle, which can
    exceed lp_feas; this pass re-folds the stragglers with a dedup threshold
    below lp_feas so the result is invariant at the verification tolerance.
    The angular increments shrink geometrically, so few folds are needed.
    """
    from dataclasses import replace as _replace

    tight = _replace(tol, dedup_angle=min(tol.dedup_angle, 0.1 * tol.lp_feas))
    queue = list(range(hull.n_generators))
    folds = 0
    while queue:
        idx = queue.pop(0)
        g = hull.generators[idx]
        for A in mats:
            x = A @ g
            if float(np.linalg.norm(x)) < 1e-300:
                continue
            if membership(x, hull, "boundary", tol):
                continue
            folds += 1
            if folds > cap:
                return None
            before = hull.n_generators
            hull = add_ray(hull, x, tight)
            if hull.n_generators > before:
                queue.append(before)
    return hull


def _prune_to_extremes(hull: GeneratorCone, tol: Tolerances) -> GeneratorCone:
    """Drop every generator lying in the conic hull of the others.

    Removal is tested strictly below lp_feas so that dropped rays stay
    members of the reduced cone at the verification tolerance."""
    from dataclasses import replace as _replace

    gens = hull.generators
    tol_prune = _replace(tol, lp_feas=0.1 * tol.lp_feas)
    keep = list(range(gens.shape[0]))
    for i in range(gens.shape[0]):
        others = [k for k in keep if k != i]
        if not others:
            continue
        rest = GeneratorCone(hull.dim, gens[others])
        if membership(gens[i], rest, "boundary", tol_prune):
            keep.remove(i)
    return GeneratorCone(hull.dim, gens[keep])


def _attribute_trees(
    family: MatrixFamily,
    cone: GeneratorCone,
    budget_words: int,
    tol: Tolerances,
    match_angle: float = 1e-6,
):
    """Explain the cone's boundary as product cycles plus their image closures.

    Scans the canonical word order for products whose entire eigenvector
    cycle lies on the cone's boundary (extreme rays or faces); every such
    cycle becomes a tree.  Cycle vectors landing on extreme rays snap those
    rays onto the exact chain and their images that stay extreme join the
    tree; the scan stops once all extreme rays are covered this way (or the
    budget ends).  Returns (trees, snapped generators).
    """
    rays = [row.copy() for row in cone.generators]
    covered = [False] * len(rays)

    def match(v: np.ndarray):
        V = np.asarray(rays)
        ch = np.linalg.norm(V - v, axis=1)
        i = int(np.argmin(ch))
        if 2.0 * np.arcsin(min(float(ch[i]), 2.0) / 2.0) <= match_angle:
            return i
        return -1

    trees: list[CyclicTree] = []
    for j in range(1, budget_words + 1):
        if all(covered):
            break
        word = enumerate_words(family.m, j)
        if word is None:
            break
        try:
            root = cyclic_root(word, family.matrices, tol)
        except (NoPerronInProduct, NonSimpleRoot, ZeroCycle):
            continue
        sign = None
        for cand in (1.0, -1.0):
            if membership(cand * root.vectors[0], cone, "boundary", tol):
                sign = cand
                break
        if sign is None:
            continue
        vecs = sign * root.vectors
        if membership(vecs[0], cone, "interior", tol):
            continue
        ok = True
        for v in vecs[1:]:
            if not membership(v, cone, "boundary", tol) or membership(
                v, cone, "interior", tol
            ):
                ok = False
                break
        if not ok:
            continue
        tree_rays: list[np.ndarray] = []
        queue: list[np.ndarray] = []
        seen = set()
        for v in vecs:
            i = match(v)
            if i >= 0:
                rays[i] = v
                covered[i] = True
                if i in seen:
                    continue
                seen.add(i)
                queue.append(v)
            tree_rays.append(v)
        while queue:
            v = queue.pop(0)
            for A in family.matrices:
                x = A @ v
                nx = float(np.linalg.norm(x))
                if nx < 1e-300:
                    continue
                x = x / nx
                k = match(x)
                if k >= 0 and k not in seen:
                    seen.add(k)
                    rays[k] = x
                    covered[k] = True
                    tree_rays.append(x)
                    queue.append(x)
        trees.append(
            CyclicTree(
                word=word,
                vectors=GeneratorCone.from_rays(np.asarray(tree_rays), tol).generators,
            )
        )
    return trees, GeneratorCone(cone.dim, np.asarray(rays))


def _finish_minimal(family, hull, budget_words, words_used, skipped, tol) -> Outcome:
    """Reduce the invariant hull to extreme rays, explain them as cyclic
    trees, and snap rays onto the exact cycles when that preserves
    invariance."""
    if hull.n_generators == 0:
        return Inconclusive(words_used, "no cycle contributed any vector")
    cone = _prune_to_extremes(hull, tol)
    trees, snapped = _attribute_trees(family, cone, budget_words, tol)
    try:
        _verify_invariance(family, snapped, tol)
        cone = snapped
    except VerificationFailed:
        # keep the attribution but discard the snapped geometry
        logger.debug("snapped cone failed invariance; keeping the pruned hull rays")
    logger.debug(
        "minimal cone: %d generators (%d before reduction), %d trees, %d skipped roots",
        cone.n_generators, hull.n_generators, len(trees), len(skipped),
    )
    return MinimalConeFound(
        cone=cone, trees=tuple(trees), certificate=InvarianceProof()
    )


def maximal_cone(
    family: MatrixFamily,
    dual_warmup_iters: int | None = None,
    budget_words: int = 240,
    tol: Tolerances = DEFAULT_TOL,
    generator_cap: int = 20000,
) -> HalfspaceCone | Outcome:
    """Maximal invariant cone in halfspace form: the dual of the transposed
    family's minimal cone.  Propagates any non-success outcome unchanged.

    The normal set is oriented against the left mean eigenvector, so the
    returned copy of the (sign-ambiguous) maximal cone is the one containing
    the family's primal cones as this module orients them."""
    out = minimal_cone(
        family.transposed(),
        dual_warmup_iters=dual_warmup_iters,
        budget_words=budget_words,
        tol=tol,
        generator_cap=generator_cap,
    )
    if isinstance(out, MinimalConeFound):
        normals = out.cone.generators
        pair, _ = _mean_eigen_pair(family, tol)
        if pair is not None:
            _, vs = pair
            if float(np.sum(normals @ vs)) < 0:
                normals = -normals
        return HalfspaceCone(dim=family.dim, normals=normals)
    return out


# ---------------------------------------------------------------------------
# verification


def _verify_invariance(family: MatrixFamily, cone: GeneratorCone, tol: Tolerances):
    if cone.n_generators == 0:
        raise VerificationFailed("the certified cone has no generators")
    if is_full_space(cone, tol):
        raise VerificationFailed("the certified cone is the whole space")
    for gi, g in enumerate(cone.generators):
        if membership(-g, cone, "boundary", tol):
            raise VerificationFailed(f"cone is not pointed: -g[{gi}] is a member")
    for i, A in enumerate(family.matrices):
        for gi, g in enumerate(cone.generators):
            if not membership(A @ g, cone, "boundary", tol):
                raise VerificationFailed(
                    f"invariance fails: matrix {i + 1} maps generator {gi} outside"
                )


def _verify_negative_pairing(family, cert: NegativePairing, tol: Tolerances):
    mats = family.matrices
    mats_t = tuple(M.T for M in mats)
    pair, breakdown = _mean_eigen_pair(family, tol)
    if pair is None:
        raise VerificationFailed(
            f"cannot reproduce the oriented mean eigenpair ({breakdown.reason})"
        )
    v, vs = pair
    if not cert.cycle_word:
        x = _apply_word(cert.primal_word, mats, v)
        xs = _apply_word(cert.dual_word, mats_t, vs)
        nx, ns = float(np.linalg.norm(x)), float(np.linalg.norm(xs))
        if nx < 1e-300 or ns < 1e-300:
            raise VerificationFailed("a recorded orbit vector degenerated to zero")
        x, xs = x / nx, xs / ns  # pairings are recorded on unit rays
        value = float(xs @ x)
        if not value < 0.0:
            raise VerificationFailed(
                f"recomputed pairing {value:.3e} is not negative"
            )
        if abs(value - cert.value) > 1e-6 * (1.0 + abs(cert.value)):
            raise VerificationFailed(
                f"recorded pairing {cert.value:.6e} does not replay "
                f"(recomputed {value:.6e})"
            )
        return
    if cert.plus is None or cert.minus is None:
        raise VerificationFailed("cycle pairing certificate lacks a two-sided witness")
    try:
        root = cyclic_root(Word(cert.cycle_word), mats, tol)
    except (NoPerronInProduct, NonSimpleRoot, ZeroCycle) as exc:
        raise VerificationFailed(f"cannot reproduce the cycle: {exc}") from exc

    def witness_value(w: PairWitness) -> float:
        if not 0 <= w.cycle_index < root.vectors.shape[0]:
            raise VerificationFailed("witness cycle index out of range")
        x = _apply_word(w.image_word, mats, root.vectors[w.cycle_index])
        u = _apply_word(w.dual_word, mats_t, vs)
        return float(u @ x)

    p_a = witness_value(cert.plus)
    p_b = witness_value(cert.minus)
    if not p_a * p_b < 0.0:
        raise VerificationFailed(
            f"cycle witnesses do not cover both orientations ({p_a:.3e}, {p_b:.3e})"
        )


def _verify_perron_breakdown(family, cert: PerronBreakdown, tol: Tolerances):
    if cert.kind == "combination":
        if len(cert.weights) != family.m or any(w <= 0 for w in cert.weights):
            raise VerificationFailed("combination weights are invalid")
        if irreducibility_check(family, tol).status != "irreducible":
            raise VerificationFailed(
                "combination breakdown requires an irreducible family"
            )
        M = sum(w * A for w, A in zip(cert.weights, family.matrices))
        if cert.reason == "no_perron":
            if leading_eigenpair(M, tol) is not None:
                raise VerificationFailed("the combination does have a leading eigenpair")
        elif cert.reason == "not_simple":
            pd = leading_eigenpair(M, tol)
            pdt = leading_eigenpair(M.T, tol)
            if (
                pd is not None
                and pd.geometric_simple
                and pdt is not None
                and pdt.geometric_simple
            ):
                raise VerificationFailed("the combination has a simple leading eigenpair")
        elif cert.reason == "orthogonal_pairing":
            pd = leading_eigenpair(M, tol)
            pdt = leading_eigenpair(M.T, tol)
            if pd is None or pdt is None:
                raise VerificationFailed("cannot reproduce the eigenvectors")
            pairing = abs(float(pdt.right_vector @ pd.right_vector))
            if pairing > tol.sign_eps:
                raise VerificationFailed(
                    f"left/right pairing {pairing:.3e} is not orthogonal"
                )
        else:
            raise VerificationFailed(f"unknown breakdown reason {cert.reason!r}")
    elif cert.kind == "product":
        if cert.reason != "no_perron":
            raise VerificationFailed(
                "only a missing leading eigenvalue disproves via a product"
            )
        Pi = product_of_word(cert.word, family.matrices)
        if leading_eigenpair(Pi, tol) is not None:
            raise VerificationFailed("the product does have a leading eigenpair")
    else:
        raise VerificationFailed(f"unknown breakdown kind {cert.kind!r}")


def _verify_simplex_cover(family, cert: SimplexCover, tol: Tolerances):
    mats = family.matrices
    if cert.transposed:
        mats = tuple(M.T for M in mats)
    if cert.seed_kind == "combination":
        if irreducibility_check(family, tol).status != "irreducible":
            raise VerificationFailed("covering witness requires an irreducible family")
        M = sum(w * A for w, A in zip(cert.seed_weights, mats))
        pd = leading_eigenpair(M, tol)
        if pd is None or not pd.simple:
            raise VerificationFailed("cannot reproduce a simple seed eigenvector")
        seed = pd.right_vector
    elif cert.seed_kind == "product":
        if irreducibility_check(family, tol).status != "irreducible":
            raise VerificationFailed("covering witness requires an irreducible family")
        pd = leading_eigenpair(product_of_word(cert.seed_word, mats), tol)
        if pd is None or not pd.simple:
            raise VerificationFailed("cannot reproduce a simple seed eigenvector")
        seed = pd.right_vector
    elif cert.seed_kind == "explicit":
        if cert.seed_vector is None:
            raise VerificationFailed("explicit seed vector missing")
        seed = np.asarray(cert.seed_vector, dtype=float)
    else:
        raise VerificationFailed(f"unknown seed kind {cert.seed_kind!r}")
    points = []
    for w in cert.words:
        x = _apply_word(w, mats, seed)
        nx = float(np.linalg.norm(x))
        if nx < 1e-300:
            raise VerificationFailed("a covering point degenerated to zero")
        points.append(x / nx)
    P = np.asarray(points)
    n = P.shape[0]
    if n < 2:
        raise VerificationFailed("covering witness needs at least two points")
    A = np.vstack([P.T, np.ones((1, n))])
    b = np.concatenate([np.zeros(family.dim), [1.0]])
    residual, _ = equality_feasibility(A, b)
    if residual > tol.lp_feas:
        raise VerificationFailed(
            f"recomputed points do not cover the origin (residual {residual:.3e})"
        )


def verify_certificate(
    family: MatrixFamily, outcome: Outcome, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """Re-check an outcome's certificate independently of how it was produced.

    Returns True on success and raises VerificationFailed otherwise.
    Inconclusive outcomes carry nothing to verify.
    """
    if isinstance(outcome, Inconclusive):
        raise ValueError("inconclusive outcomes carry no certificate")
    if isinstance(outcome, NoInvariantCone):
        cert = outcome.witness
        if isinstance(cert, NegativePairing):
            _verify_negative_pairing(family, cert, tol)
        elif isinstance(cert, PerronBreakdown):
            _verify_perron_breakdown(family, cert, tol)
        elif isinstance(cert, SimplexCover):
            _verify_simplex_cover(family, cert, tol)
        else:
            raise VerificationFailed(
                f"certificate {type(cert).__name__} cannot witness non-existence"
            )
        return True
    if isinstance(outcome, (ConeFound, MinimalConeFound)):
        if not isinstance(outcome.certificate, InvarianceProof):
            raise VerificationFailed("cone outcomes must carry an invariance proof")
        _verify_invariance(family, outcome.cone, tol)
        return True
    raise ValueError(f"unknown outcome type {type(outcome).__name__}")
