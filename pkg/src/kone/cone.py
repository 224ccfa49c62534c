"""Finite-generator cones: LP membership, the axis-scaling operator, cone-norms,
and conic-polytope containment."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_TOL, Tolerances, orthonormal_completion
from .lp import equality_feasibility, solve_lp

__all__ = [
    "GeneratorCone",
    "HalfspaceCone",
    "ScalingContext",
    "ConicPolytope",
    "DimensionMismatch",
    "ZeroVector",
    "UndefinedConeNorm",
    "ray_angle",
    "membership",
    "is_full_space",
    "add_ray",
    "apply_scaling",
    "cone_norm",
    "polytope_membership",
]


class DimensionMismatch(ValueError):
    pass


class ZeroVector(ValueError):
    pass


class UndefinedConeNorm(ValueError):
    """The vector pairs non-positively with the center ray; no scaled copy of
    the cone can reach it."""


def _unit(x: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(x))
    if n == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    return x / n


def ray_angle(u, v) -> float:
    """Angle between two unit vectors, exact for tiny separations."""
    chord = float(np.linalg.norm(np.asarray(u) - np.asarray(v)))
    return 2.0 * np.arcsin(min(chord, 2.0) / 2.0)


@dataclass(frozen=True, eq=False)
class GeneratorCone:
    """Pointed cone spanned by finitely many unit rays.

    The generator array is row-per-ray and treated as immutable; rays closer
    than ``dedup_angle`` are never both present.
    """

    dim: int
    generators: np.ndarray = field(default=None)  # (n, dim) unit rows

    def __post_init__(self) -> None:
        g = self.generators
        if g is None:
            g = np.zeros((0, self.dim))
        g = np.ascontiguousarray(g, dtype=float).reshape(-1, self.dim)
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)

    @classmethod
    def empty(cls, dim: int) -> "GeneratorCone":
        return cls(dim, np.zeros((0, dim)))

    @classmethod
    def from_rays(cls, rays, tol: Tolerances = DEFAULT_TOL) -> "GeneratorCone":
        rays = np.atleast_2d(np.asarray(rays, dtype=float))
        cone = cls.empty(rays.shape[1])
        for r in rays:
            cone = add_ray(cone, r, tol)
        return cone

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    def span_rank(self) -> int:
        if self.n_generators == 0:
            return 0
        return int(np.linalg.matrix_rank(self.generators, tol=1e-10))


@dataclass(frozen=True, eq=False)
class HalfspaceCone:
    """Cone given by inward normals: {x : (u, x) >= 0 for every normal u}.

    Output-only representation (no generator recovery is attempted).
    """

    dim: int
    normals: np.ndarray  # (n, dim) unit rows

    def __post_init__(self) -> None:
        u = np.ascontiguousarray(self.normals, dtype=float).reshape(-1, self.dim)
        u.setflags(write=False)
        object.__setattr__(self, "normals", u)

    def contains(self, x, slack: float = 1e-8) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"expected dimension {self.dim}")
        nx = float(np.linalg.norm(x))
        if nx == 0.0:
            return True
        return bool(np.all(self.normals @ (x / nx) >= -slack))


@dataclass(frozen=True, eq=False)
class ScalingContext:
    """Center ray c with its orthonormal completion C, the scale factor t, and
    the ambient basis change V (identity when no alignment is involved).

    The scaling operator fixes the c-axis and dilates every hyperplane
    orthogonal to it by t.
    """

    c: np.ndarray
    C: np.ndarray
    t: float
    V: np.ndarray
    V_inv: np.ndarray

    def __post_init__(self) -> None:
        if self.t <= 0:
            raise ValueError("scale factor t must be positive")
        for name in ("c", "C", "V", "V_inv"):
            a = np.ascontiguousarray(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def from_center(cls, c, t: float, V=None) -> "ScalingContext":
        c = _unit(np.asarray(c, dtype=float))
        C = orthonormal_completion(c)
        d = c.size
        if V is None:
            V = np.eye(d)
            V_inv = np.eye(d)
        else:
            V = np.asarray(V, dtype=float)
            V_inv = np.linalg.inv(V)
        return cls(c=c, C=C, t=float(t), V=V, V_inv=V_inv)

    def with_scale(self, t: float) -> "ScalingContext":
        return ScalingContext(c=self.c, C=self.C, t=float(t), V=self.V, V_inv=self.V_inv)

    def matrix(self) -> np.ndarray:
        """Dense form of the scaling operator: fixes c, dilates c-orthogonals by t."""
        d = self.c.size
        return self.t * np.eye(d) + (1.0 - self.t) * np.outer(self.c, self.c)


@dataclass(frozen=True, eq=False)
class ConicPolytope:
    """Unbounded polyhedron co(S) + K for a finite S inside the cone K."""

    base_points: np.ndarray  # (k, dim)
    recession: GeneratorCone

    def __post_init__(self) -> None:
        s = np.ascontiguousarray(self.base_points, dtype=float).reshape(
            -1, self.recession.dim
        )
        if s.shape[0] == 0:
            raise ValueError("base point set must be nonempty")
        s.setflags(write=False)
        object.__setattr__(self, "base_points", s)

    @property
    def dim(self) -> int:
        return self.recession.dim


def membership(
    x, cone: GeneratorCone, mode: str = "boundary", tol: Tolerances = DEFAULT_TOL
) -> bool:
    """Is x in the cone (mode "boundary") or in its interior (mode "interior")?

    Boundary mode solves one nonnegative-combination LP.  Interior mode
    additionally requires the 2*dim perturbed points x +- margin*e_i to pass,
    which is sound for full-dimensional cones.
    """
    if mode not in ("boundary", "interior"):
        raise ValueError(f"unknown membership mode {mode!r}")
    x = np.asarray(x, dtype=float)
    if x.shape != (cone.dim,):
        raise DimensionMismatch(f"expected a vector of dimension {cone.dim}")
    nx = float(np.linalg.norm(x))
    if nx < 1e-300:
        return mode == "boundary"  # the apex is a member but never interior
    if cone.n_generators == 0:
        return False
    u = x / nx
    A = cone.generators.T
    if not _feasible(A, u, tol):
        return False
    if mode == "boundary":
        return True
    d = cone.dim
    margin = tol.member_margin
    for i in range(d):
        e = np.zeros(d)
        e[i] = margin
        if not _feasible(A, u + e, tol) or not _feasible(A, u - e, tol):
            return False
    return True


def _feasible(A, b, tol: Tolerances) -> bool:
    residual, _ = equality_feasibility(A, b)
    return residual <= tol.lp_feas


def is_full_space(cone: GeneratorCone, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when the cone has grown into the whole space (every +-axis is inside)."""
    d = cone.dim
    if cone.n_generators <= d:
        return False
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        if not membership(e, cone, "boundary", tol):
            return False
        if not membership(-e, cone, "boundary", tol):
            return False
    return True


def add_ray(cone: GeneratorCone, x, tol: Tolerances = DEFAULT_TOL) -> GeneratorCone:
    """Cone with the ray of x appended, unless an existing ray is within
    ``dedup_angle``.  Returns the original object when nothing changes."""
    x = np.asarray(x, dtype=float)
    if x.shape != (cone.dim,):
        raise DimensionMismatch(f"expected a vector of dimension {cone.dim}")
    u = _unit(x)
    if cone.n_generators:
        chords = np.linalg.norm(cone.generators - u, axis=1)
        if 2.0 * np.arcsin(min(float(chords.min()), 2.0) / 2.0) <= tol.dedup_angle:
            return cone
    return GeneratorCone(cone.dim, np.vstack([cone.generators, u[None, :]]))


def apply_scaling(ctx: ScalingContext, x) -> np.ndarray:
    """Image of x under the scaling operator: t*x + (1-t)*(c,x)*c."""
    x = np.asarray(x, dtype=float)
    if x.shape != ctx.c.shape:
        raise DimensionMismatch("vector dimension does not match the context")
    return ctx.t * x + (1.0 - ctx.t) * float(ctx.c @ x) * ctx.c


def cone_norm(
    x, cone: GeneratorCone, ctx: ScalingContext, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Minkowski-type gauge of x on cross-sections orthogonal to the center ray:
    the least t > 0 whose t-scaled copy of the cone contains x.

    Computed as the reciprocal of the optimum of

        maximize t  s.t.  diag(1, t, ..., t) x~ = sum_i a_i v~_i,  a >= 0, t >= 0

    in completion coordinates (x~ = C^T x).  Value 0 means x lies on the
    center ray; an unreachable x (no scaled copy contains it) maps to inf.

    Raises UndefinedConeNorm when (x, c) <= sign_eps.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (ctx.c.shape[0],) or cone.dim != ctx.c.shape[0]:
        raise DimensionMismatch("vector, cone and context dimensions must agree")
    pairing = float(x @ ctx.c)
    if pairing <= tol.sign_eps:
        raise UndefinedConeNorm(f"(x, c) = {pairing:.3e} is not positive")
    if cone.n_generators == 0:
        return np.inf
    nx = float(np.linalg.norm(x))
    xt = (ctx.C.T @ x) / nx
    gt = cone.generators @ ctx.C  # row i = completion coordinates of generator i
    d = cone.dim
    n = cone.n_generators
    A = np.zeros((d, n + 1))
    A[1:, 0] = xt[1:]
    A[0, 1:] = gt[:, 0]
    A[1:, 1:] = -gt[:, 1:].T
    b = np.zeros(d)
    b[0] = xt[0]
    c_obj = np.zeros(n + 1)
    c_obj[0] = -1.0  # maximize t
    res = solve_lp(A, b, c_obj, feas_tol=tol.lp_feas)
    if res.status == "unbounded":
        return 0.0
    if res.status != "optimal":
        return np.inf
    t_opt = float(res.x[0])
    if t_opt <= 1e-300:
        return np.inf
    return 1.0 / t_opt


def polytope_membership(
    x, polytope: ConicPolytope, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """Is x expressible as a convex combination of the base points plus a
    nonnegative combination of the recession rays?"""
    x = np.asarray(x, dtype=float)
    if x.shape != (polytope.dim,):
        raise DimensionMismatch(f"expected a vector of dimension {polytope.dim}")
    S = polytope.base_points
    G = polytope.recession.generators
    d = polytope.dim
    A = np.zeros((d + 1, S.shape[0] + G.shape[0]))
    A[:d, : S.shape[0]] = S.T
    A[:d, S.shape[0] :] = G.T
    A[d, : S.shape[0]] = 1.0  # convex-combination row
    b = np.concatenate([x, [1.0]])
    residual, _ = equality_feasibility(A, b)
    return residual <= tol.lp_feas * (1.0 + float(np.linalg.norm(x)))
