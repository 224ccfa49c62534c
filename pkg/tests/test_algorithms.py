"""The four decision procedures and their certificates."""

import numpy as np
import pytest

from kone.algorithms import (
    ConeFound,
    Inconclusive,
    InvarianceProof,
    MatrixFamily,
    MinimalConeFound,
    NegativePairing,
    NoInvariantCone,
    PerronBreakdown,
    VerificationFailed,
    direct_algorithm,
    irreducibility_check,
    maximal_cone,
    minimal_cone,
    polyhedral_cone,
    primal_dual,
    verify_certificate,
)
from kone.cone import GeneratorCone, HalfspaceCone, is_full_space, membership, ray_angle

from fixtures import (
    BOOLEAN_LONG_ROOT_CLASS,
    BOOLEAN_LONG_ROOT_PAIR,
    BOOLEAN_SEVEN_TREE_CLASSES,
    BOOLEAN_SEVEN_TREE_PAIR,
    MIXED_SIGN_PAIR,
    MIXED_SIGN_RAYS,
    NO_CONE_PAIR_2D,
    SPIRAL_PAIR,
)


@pytest.fixture(scope="module")
def mixed_family():
    return MatrixFamily.from_arrays(MIXED_SIGN_PAIR)


@pytest.fixture(scope="module")
def spiral_family():
    return MatrixFamily.from_arrays(SPIRAL_PAIR)


@pytest.fixture(scope="module")
def no_cone_family():
    return MatrixFamily.from_arrays(NO_CONE_PAIR_2D)


@pytest.fixture(scope="module")
def positive_family():
    rng = np.random.default_rng(3)
    return MatrixFamily.from_arrays(
        [rng.uniform(0.2, 1.0, (3, 3)), rng.uniform(0.2, 1.0, (3, 3))]
    )


def ray_matches(cone: GeneratorCone, vector, angle=1e-6) -> bool:
    v = np.asarray(vector, dtype=float)
    v = v / np.linalg.norm(v)
    return any(ray_angle(g, v) <= angle for g in cone.generators)


# ---------------------------------------------------------------------- family


def test_family_validation():
    with pytest.raises(ValueError):
        MatrixFamily.from_arrays([])
    with pytest.raises(ValueError):
        MatrixFamily.from_arrays([np.ones((2, 3))])
    with pytest.raises(ValueError):
        MatrixFamily.from_arrays([np.eye(2), np.eye(3)])
    fam = MatrixFamily.from_arrays([np.eye(2), 3 * np.eye(2)])
    assert np.allclose(fam.mean, 2 * np.eye(2))
    assert fam.transposed().dim == 2


# -------------------------------------------------------------- irreducibility


def test_diagonal_family_is_undetermined():
    fam = MatrixFamily.from_arrays([np.diag([1.0, 2.0]), np.diag([3.0, 4.0])])
    report = irreducibility_check(fam)
    assert report.status == "undetermined"
    assert report.algebra_dim == 2


def test_mixed_family_is_irreducible(mixed_family):
    report = irreducibility_check(mixed_family)
    assert report.status == "irreducible"
    assert report.algebra_dim == 9


def test_rotation_is_undetermined_by_the_algebra_test():
    th = np.deg2rad(45.0)
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    report = irreducibility_check(MatrixFamily.from_arrays([R]))
    assert report.status == "undetermined"
    assert report.algebra_dim == 2


# ---------------------------------------------------------------------- direct


def test_direct_stays_in_orthant_for_positive_family(positive_family):
    # the whole trace lives in one orthant copy (the seed sign is provisional)
    run = direct_algorithm(positive_family, budget=50)
    assert isinstance(run.outcome, Inconclusive) or isinstance(run.outcome, ConeFound)
    sign = np.sign(run.cones[0].generators[0, 0])
    for cone in run.cones:
        assert np.all(sign * cone.generators >= -1e-9)


def test_direct_never_halts_on_spiral_pair(spiral_family):
    run = direct_algorithm(spiral_family, budget=50)
    assert isinstance(run.outcome, Inconclusive)
    sizes = [c.n_generators for c in run.cones]
    assert sizes == sorted(sizes)
    assert sizes[-1] > sizes[1]


def test_direct_trace_is_nested(spiral_family):
    run = direct_algorithm(spiral_family, budget=12)
    for prev, cur in zip(run.cones, run.cones[1:]):
        for g in prev.generators:
            assert membership(g, cur, "boundary")


def test_direct_span_grows_quickly(mixed_family):
    # full-dimensional within dim - 1 growth rounds for irreducible families
    run = direct_algorithm(mixed_family, budget=5)
    assert run.cones[2].span_rank() == 3


def test_direct_terminates_on_annihilating_seed():
    # a nilpotent member maps the seed ray to the apex, so growth can stop
    fam = MatrixFamily.from_arrays([np.array([[0.0, 1.0], [0.0, 0.0]])])
    run = direct_algorithm(fam, seed_vector=np.array([1.0, 0.0]), budget=10)
    assert isinstance(run.outcome, ConeFound)
    assert run.outcome.cone.n_generators == 1
    verify_certificate(fam, run.outcome)


def test_direct_seed_failure_is_inconclusive_without_irreducibility():
    fam = MatrixFamily.from_arrays([np.array([[0.0, 1.0], [0.0, 0.0]])])
    run = direct_algorithm(fam, budget=10)
    assert isinstance(run.outcome, Inconclusive)


# ------------------------------------------------------------------ primal-dual


def test_primal_dual_disproves_no_cone_pair(no_cone_family):
    out = primal_dual(no_cone_family, budget=30)
    assert isinstance(out, NoInvariantCone)
    assert isinstance(out.witness, NegativePairing)
    assert out.witness.value < -1e-10
    assert verify_certificate(no_cone_family, out)


def test_primal_dual_inconclusive_when_cone_exists(mixed_family):
    out = primal_dual(mixed_family, budget=10)
    assert isinstance(out, Inconclusive)


def test_primal_dual_on_duplicated_matrix():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    out = primal_dual(MatrixFamily.from_arrays([A, A]), budget=5)
    assert isinstance(out, Inconclusive)


def test_primal_dual_never_contradicts_construction(positive_family, mixed_family):
    for fam, t in ((positive_family, 1.5), (mixed_family, 1.5)):
        run = polyhedral_cone(fam, t=t)
        assert isinstance(run.outcome, ConeFound)
        verify_certificate(fam, run.outcome)
        assert not isinstance(primal_dual(fam, budget=20), NoInvariantCone)


def test_tampered_pairing_fails_verification(no_cone_family):
    out = primal_dual(no_cone_family, budget=30)
    w = out.witness
    flipped = NoInvariantCone(
        witness=NegativePairing(
            value=-w.value,  # sign-flipped value no longer replays
            primal_word=w.primal_word,
            dual_word=w.dual_word,
        )
    )
    with pytest.raises(VerificationFailed):
        verify_certificate(no_cone_family, flipped)
    empty = NoInvariantCone(witness=NegativePairing(value=w.value))
    with pytest.raises(VerificationFailed):
        verify_certificate(no_cone_family, empty)


# ------------------------------------------------------------------- polyhedral


def test_polyhedral_on_positive_family(positive_family):
    run = polyhedral_cone(positive_family, t=1.5)
    out = run.outcome
    assert isinstance(out, ConeFound)
    assert isinstance(out.certificate, InvarianceProof)
    verify_certificate(positive_family, out)
    for A in positive_family.matrices:
        for g in out.cone.generators:
            assert membership(A @ g, out.cone, "boundary")
    assert not is_full_space(out.cone)


def test_polyhedral_contains_minimal_cone(mixed_family):
    run = polyhedral_cone(mixed_family, t=1.5)
    assert isinstance(run.outcome, ConeFound)
    for k in MIXED_SIGN_RAYS:
        assert membership(np.asarray(k), run.outcome.cone, "boundary")


def test_polyhedral_too_large_scale_is_inconclusive(mixed_family):
    run = polyhedral_cone(mixed_family, t=5.0)
    assert isinstance(run.outcome, Inconclusive)
    assert "smaller t" in run.outcome.reason


def test_unit_scale_reproduces_plain_growth(mixed_family):
    # with t = 1 the scaled growth is the plain growth in aligned coordinates:
    # the cone sequences match as ray sets under the basis change
    run = polyhedral_cone(mixed_family, t=1.0, budget=4)
    assert isinstance(run.outcome, Inconclusive)
    direct = direct_algorithm(mixed_family, budget=4)
    V = run.context.V
    # both trajectories carry provisional seed signs: compare as +- ray sets
    for scaled, plain in zip(run.scaled_cones[1:], direct.cones[1:]):
        mapped = GeneratorCone.from_rays(scaled.generators @ V.T)
        assert mapped.n_generators == plain.n_generators
        for g in plain.generators:
            assert ray_matches(mapped, g, angle=1e-7) or ray_matches(
                mapped, -g, angle=1e-7
            )


def test_polyhedral_rejects_bad_scale(mixed_family):
    with pytest.raises(ValueError):
        polyhedral_cone(mixed_family, t=0.5)


# ----------------------------------------------------------------- minimal cone


@pytest.fixture(scope="module")
def mixed_minimal(mixed_family):
    out = minimal_cone(mixed_family)
    assert isinstance(out, MinimalConeFound)
    return out


def test_minimal_cone_exact_rays(mixed_family, mixed_minimal):
    out = mixed_minimal
    assert out.cone.n_generators == 4
    for k in MIXED_SIGN_RAYS:
        assert ray_matches(out.cone, k)
    verify_certificate(mixed_family, out)


def test_minimal_cone_self_similarity(mixed_family, mixed_minimal):
    # the cone equals the hull of its own images: every generator image is
    # inside, and every generator is reproduced by some image ray
    out = mixed_minimal
    images = []
    for A in mixed_family.matrices:
        for g in out.cone.generators:
            img = A @ g
            assert membership(img, out.cone, "boundary")
            if np.linalg.norm(img) > 1e-12:
                images.append(img / np.linalg.norm(img))
    image_cone = GeneratorCone.from_rays(images)
    for g in out.cone.generators:
        assert membership(g, image_cone, "boundary", tol=_loose())


def _loose():
    from kone.linalg import Tolerances

    return Tolerances(lp_feas=1e-7)


def test_minimal_cone_spiral_pair(spiral_family):
    out = minimal_cone(spiral_family)
    assert isinstance(out, MinimalConeFound)
    assert out.cone.n_generators == 16
    verify_certificate(spiral_family, out)


def test_minimal_cone_boolean_long_root():
    fam = MatrixFamily.from_arrays(BOOLEAN_LONG_ROOT_PAIR)
    out = minimal_cone(fam)
    assert isinstance(out, MinimalConeFound)
    assert len(out.trees) == 1
    tree = out.trees[0]
    assert len(tree.word.letters) == 10
    assert tree.word.letters == BOOLEAN_LONG_ROOT_CLASS
    verify_certificate(fam, out)


def test_minimal_cone_boolean_seven_trees():
    fam = MatrixFamily.from_arrays(BOOLEAN_SEVEN_TREE_PAIR)
    out = minimal_cone(fam)
    assert isinstance(out, MinimalConeFound)
    words = tuple(t.word.letters for t in out.trees)
    assert words == BOOLEAN_SEVEN_TREE_CLASSES
    verify_certificate(fam, out)


def test_minimal_cone_trace_containment(spiral_family):
    # plain growth stays inside the minimal cone
    out = minimal_cone(spiral_family)
    run = direct_algorithm(spiral_family, budget=25)
    loose = _loose()
    for g in run.cones[-1].generators:
        assert membership(g, out.cone, "boundary", loose)


# ----------------------------------------------------------------- maximal cone


def test_maximal_cone_contains_minimal(mixed_family, mixed_minimal):
    half = maximal_cone(mixed_family)
    assert isinstance(half, HalfspaceCone)
    for k in MIXED_SIGN_RAYS:
        assert half.contains(np.asarray(k))
    for g in mixed_minimal.cone.generators:
        assert half.contains(g)


def test_maximal_cone_symmetric_family():
    # symmetric members: transposition is the identity, so the halfspace
    # normals coincide with the minimal cone's rays
    fam = MatrixFamily.from_arrays(
        [np.array([[2.0, 1.0], [1.0, 1.0]]), np.array([[3.0, 1.0], [1.0, 2.0]])]
    )
    out = minimal_cone(fam)
    assert isinstance(out, MinimalConeFound)
    half = maximal_cone(fam)
    assert isinstance(half, HalfspaceCone)
    assert half.normals.shape[0] == out.cone.n_generators
    for u in half.normals:
        assert ray_matches(out.cone, u, angle=1e-7)


# ---------------------------------------------------------------- verification


def test_verify_rejects_corrupted_cone(mixed_family, mixed_minimal):
    broken = MinimalConeFound(
        cone=GeneratorCone.from_rays(
            np.vstack([mixed_minimal.cone.generators, [[0.0, 0.0, -1.0]]])
        ),
        trees=mixed_minimal.trees,
        certificate=mixed_minimal.certificate,
    )
    with pytest.raises(VerificationFailed):
        verify_certificate(mixed_family, broken)


def test_verify_rejects_unsound_breakdown(mixed_family):
    fake = NoInvariantCone(
        witness=PerronBreakdown("combination", "no_perron", weights=(0.5, 0.5))
    )
    with pytest.raises(VerificationFailed):
        verify_certificate(mixed_family, fake)


def test_verify_requires_certificate():
    fam = MatrixFamily.from_arrays([np.eye(2)])
    with pytest.raises(ValueError):
        verify_certificate(fam, Inconclusive(1, "nothing"))
