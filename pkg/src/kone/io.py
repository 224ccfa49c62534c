"""JSON file formats for matrix families and algorithm outcomes.

Family files carry the matrices; outcome files carry the verdict, the
generators, the certificate (with enough provenance to re-verify it from
scratch), and run metadata.  Vectors round-trip losslessly through the
default float repr, which is shortest-exact for doubles.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from typing import Any

import numpy as np

from .algorithms import (
    Certificate,
    ConeFound,
    CyclicTree,
    Inconclusive,
    InvarianceProof,
    MatrixFamily,
    MinimalConeFound,
    NegativePairing,
    NoInvariantCone,
    Outcome,
    PairWitness,
    PerronBreakdown,
    SimplexCover,
)
from .cone import GeneratorCone, HalfspaceCone
from .words import Word

__all__ = [
    "FamilyFileError",
    "read_family",
    "family_to_dict",
    "write_family",
    "outcome_to_dict",
    "outcome_from_dict",
    "write_outcome",
    "read_outcome",
]


class FamilyFileError(ValueError):
    """The family file is malformed or inconsistent."""


def family_to_dict(family: MatrixFamily, labels=None) -> dict:
    doc = {
        "dim": family.dim,
        "matrices": [M.tolist() for M in family.matrices],
    }
    if labels is not None:
        doc["labels"] = list(labels)
    return doc


def write_family(path, family: MatrixFamily, labels=None) -> None:
    with open(path, "w") as fh:
        json.dump(family_to_dict(family, labels), fh, indent=1)


def read_family(path) -> MatrixFamily:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FamilyFileError(f"cannot read family file: {exc}") from exc
    if not isinstance(doc, dict) or "matrices" not in doc:
        raise FamilyFileError("family file must be an object with a 'matrices' array")
    mats = doc["matrices"]
    if not isinstance(mats, list) or not mats:
        raise FamilyFileError("the matrix list must be nonempty")
    dim = doc.get("dim")
    arrays = []
    for k, m in enumerate(mats):
        try:
            M = np.asarray(m, dtype=float)
        except (TypeError, ValueError) as exc:
            raise FamilyFileError(f"matrix {k} is not numeric") from exc
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise FamilyFileError(f"matrix {k} is not square")
        if dim is not None and M.shape[0] != dim:
            raise FamilyFileError(f"matrix {k} does not match dim = {dim}")
        if not np.all(np.isfinite(M)):
            raise FamilyFileError(f"matrix {k} has non-finite entries")
        arrays.append(M)
    if len({M.shape[0] for M in arrays}) != 1:
        raise FamilyFileError("matrices must share one dimension")
    return MatrixFamily.from_arrays(arrays)


def _vec(x) -> list:
    return np.asarray(x, dtype=float).tolist()


def _witness_to_dict(w: PairWitness | None):
    if w is None:
        return None
    return {
        "dual_word": list(w.dual_word),
        "cycle_index": w.cycle_index,
        "image_word": list(w.image_word),
        "value": w.value,
    }


def _witness_from_dict(doc) -> PairWitness | None:
    if doc is None:
        return None
    return PairWitness(
        dual_word=tuple(doc["dual_word"]),
        cycle_index=int(doc["cycle_index"]),
        image_word=tuple(doc["image_word"]),
        value=float(doc["value"]),
    )


def certificate_to_dict(cert: Certificate) -> dict:
    if isinstance(cert, NegativePairing):
        return {
            "type": "negative_pairing",
            "value": cert.value,
            "primal_word": list(cert.primal_word),
            "dual_word": list(cert.dual_word),
            "cycle_word": list(cert.cycle_word),
            "plus": _witness_to_dict(cert.plus),
            "minus": _witness_to_dict(cert.minus),
        }
    if isinstance(cert, PerronBreakdown):
        return {
            "type": "perron_breakdown",
            "kind": cert.kind,
            "reason": cert.reason,
            "weights": list(cert.weights),
            "word": list(cert.word),
        }
    if isinstance(cert, SimplexCover):
        return {
            "type": "simplex_cover",
            "words": [list(w) for w in cert.words],
            "points": cert.points.tolist(),
            "seed_kind": cert.seed_kind,
            "seed_weights": list(cert.seed_weights),
            "seed_word": list(cert.seed_word),
            "seed_vector": _vec(cert.seed_vector) if cert.seed_vector is not None else None,
            "transposed": cert.transposed,
        }
    if isinstance(cert, InvarianceProof):
        return {"type": "invariance_proof", "margins": list(cert.margins)}
    raise TypeError(f"unknown certificate type {type(cert).__name__}")


def certificate_from_dict(doc: dict) -> Certificate:
    kind = doc.get("type")
    if kind == "negative_pairing":
        return NegativePairing(
            value=float(doc["value"]),
            primal_word=tuple(doc["primal_word"]),
            dual_word=tuple(doc["dual_word"]),
            cycle_word=tuple(doc["cycle_word"]),
            plus=_witness_from_dict(doc.get("plus")),
            minus=_witness_from_dict(doc.get("minus")),
        )
    if kind == "perron_breakdown":
        return PerronBreakdown(
            kind=doc["kind"],
            reason=doc["reason"],
            weights=tuple(float(w) for w in doc["weights"]),
            word=tuple(doc["word"]),
        )
    if kind == "simplex_cover":
        sv = doc.get("seed_vector")
        return SimplexCover(
            words=tuple(tuple(w) for w in doc["words"]),
            points=np.asarray(doc["points"], dtype=float),
            seed_kind=doc["seed_kind"],
            seed_weights=tuple(float(w) for w in doc["seed_weights"]),
            seed_word=tuple(doc["seed_word"]),
            seed_vector=np.asarray(sv, dtype=float) if sv is not None else None,
            transposed=bool(doc["transposed"]),
        )
    if kind == "invariance_proof":
        return InvarianceProof(margins=tuple(float(m) for m in doc["margins"]))
    raise FamilyFileError(f"unknown certificate type {kind!r}")


def outcome_to_dict(outcome: Outcome | HalfspaceCone, metadata: dict | None = None) -> dict:
    doc: dict[str, Any] = {"metadata": metadata or {}}
    if isinstance(outcome, HalfspaceCone):
        doc["verdict"] = "maximal_halfspace_cone"
        doc["normals"] = outcome.normals.tolist()
        doc["dim"] = outcome.dim
        return doc
    doc["verdict"] = outcome.verdict
    if isinstance(outcome, NoInvariantCone):
        doc["certificate"] = certificate_to_dict(outcome.witness)
    elif isinstance(outcome, ConeFound):
        doc["generators"] = outcome.cone.generators.tolist()
        doc["dim"] = outcome.cone.dim
        doc["center"] = _vec(outcome.center)
        doc["certificate"] = certificate_to_dict(outcome.certificate)
    elif isinstance(outcome, MinimalConeFound):
        doc["generators"] = outcome.cone.generators.tolist()
        doc["dim"] = outcome.cone.dim
        doc["certificate"] = certificate_to_dict(outcome.certificate)
        doc["trees"] = [
            {
                "word": list(t.word.letters),
                "factors": str(t.word),
                "vectors": t.vectors.tolist(),
            }
            for t in outcome.trees
        ]
    elif isinstance(outcome, Inconclusive):
        doc["iterations_used"] = outcome.iterations_used
        doc["reason"] = outcome.reason
    else:
        raise TypeError(f"unknown outcome type {type(outcome).__name__}")
    return doc


def outcome_from_dict(doc: dict) -> tuple[Outcome | HalfspaceCone, dict]:
    verdict = doc.get("verdict")
    meta = doc.get("metadata", {})
    if verdict == "maximal_halfspace_cone":
        return (
            HalfspaceCone(dim=int(doc["dim"]), normals=np.asarray(doc["normals"])),
            meta,
        )
    if verdict == "no_invariant_cone":
        return NoInvariantCone(witness=certificate_from_dict(doc["certificate"])), meta
    if verdict == "cone_found":
        cone = GeneratorCone(int(doc["dim"]), np.asarray(doc["generators"], dtype=float))
        return (
            ConeFound(
                cone=cone,
                center=np.asarray(doc["center"], dtype=float),
                certificate=certificate_from_dict(doc["certificate"]),
            ),
            meta,
        )
    if verdict == "minimal_cone_found":
        cone = GeneratorCone(int(doc["dim"]), np.asarray(doc["generators"], dtype=float))
        trees = tuple(
            CyclicTree(
                word=Word(tuple(t["word"])),
                vectors=np.asarray(t["vectors"], dtype=float),
            )
            for t in doc.get("trees", [])
        )
        return (
            MinimalConeFound(
                cone=cone,
                trees=trees,
                certificate=certificate_from_dict(doc["certificate"]),
            ),
            meta,
        )
    if verdict == "inconclusive":
        return Inconclusive(int(doc["iterations_used"]), doc["reason"]), meta
    raise FamilyFileError(f"unknown verdict {verdict!r}")


def write_outcome(path, outcome: Outcome | HalfspaceCone, metadata: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(outcome_to_dict(outcome, metadata), fh, indent=1)


def read_outcome(path) -> tuple[Outcome | HalfspaceCone, dict]:
    with open(path) as fh:
        return outcome_from_dict(json.load(fh))
