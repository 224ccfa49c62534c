"""Command-line front end: read a matrix family, run an algorithm, write the
outcome (with its certificate re-verified) and optional cross-section data.

Exit codes: 0 = definitive verdict, 1 = input error, 2 = inconclusive.
Set KONE_LOG=DEBUG for verbose progress.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .algorithms import (
    ConeFound,
    Inconclusive,
    MatrixFamily,
    MinimalConeFound,
    NoInvariantCone,
    direct_algorithm,
    irreducibility_check,
    maximal_cone,
    minimal_cone,
    polyhedral_cone,
    primal_dual,
    verify_certificate,
)
from .cone import GeneratorCone, HalfspaceCone
from .experiments import (
    BracketFailure,
    ExperimentConfig,
    boolean_sweep,
    lambda_sweep,
    random_pair_study,
    summary_to_csv,
    summary_to_json,
)
from .io import FamilyFileError, outcome_to_dict, read_family, write_outcome
from .linalg import Tolerances

logger = logging.getLogger("kone.cli")

EXIT_DEFINITIVE = 0
EXIT_INPUT_ERROR = 1
EXIT_INCONCLUSIVE = 2


def _tolerances(args) -> Tolerances:
    if args.tol is not None:
        return Tolerances.from_master(args.tol)
    return Tolerances()


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("family", help="JSON family file")
    p.add_argument("--tol", type=float, default=None,
                   help="master tolerance (scales all thresholds; default 1e-9)")
    p.add_argument("--budget", type=int, default=None, help="iteration/word budget")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for fallback seeding")
    p.add_argument("--output", "-o", default=None, help="outcome JSON path")
    p.add_argument("--section", default=None,
                   help="for d = 3: write cross-section polygon data to this path")
    p.add_argument("--plane", default="center", choices=["center", "x", "y", "z"],
                   help="cross-section plane: (c, x) = 1 or a coordinate plane")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kone",
        description="decide, construct, and certify common invariant cones",
    )
    ap.add_argument("--version", action="version", version=f"kone {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="disprove existence (primal-dual pairing test)")
    _add_common(p)

    p = sub.add_parser("construct", help="construct an invariant cone by scaled growth")
    _add_common(p)
    p.add_argument("--t-scale", type=float, default=1.5, dest="t_scale",
                   help="axis scaling factor (> 1)")

    p = sub.add_parser("minimal", help="construct the minimal invariant cone")
    _add_common(p)
    p.add_argument("--dual-warmup", type=int, default=None, dest="dual_warmup",
                   help="dual growth rounds before the word scan")

    p = sub.add_parser("maximal", help="maximal invariant cone in halfspace form")
    _add_common(p)
    p.add_argument("--dual-warmup", type=int, default=None, dest="dual_warmup")

    p = sub.add_parser("direct", help="plain orbit growth (rarely terminates)")
    _add_common(p)

    p = sub.add_parser("bench", help="run an experiment config (JSON)")
    p.add_argument("config", help="experiment config JSON file")
    p.add_argument("--output", "-o", default=".", help="output directory")
    p.add_argument("--format", default="json", choices=["json", "csv", "both"])
    return ap


def _section_data(generators: np.ndarray, center, plane: str):
    """Intersect generator rays with a plane and order the points by angle."""
    d = generators.shape[1]
    if d != 3:
        return None
    if plane == "center":
        normal = np.asarray(center, dtype=float)
        normal = normal / np.linalg.norm(normal)
    else:
        normal = np.zeros(3)
        normal["xyz".index(plane)] = 1.0
    pts = []
    dropped = 0
    for g in generators:
        s = float(normal @ g)
        if s <= 1e-12:
            dropped += 1
            continue
        pts.append(g / s)
    if not pts:
        return {"plane": plane, "points": [], "dropped": dropped}
    pts = np.asarray(pts)
    u = np.array([1.0, 0.0, 0.0])
    if abs(normal @ u) > 0.9:
        u = np.array([0.0, 1.0, 0.0])
    u = u - (normal @ u) * normal
    u /= np.linalg.norm(u)
    w = np.cross(normal, u)
    centroid = pts.mean(axis=0)
    ang = np.arctan2((pts - centroid) @ w, (pts - centroid) @ u)
    order = np.argsort(ang)
    return {
        "plane": plane,
        "points": pts[order].tolist(),
        "angles_deg": np.degrees(ang[order]).tolist(),
        "dropped": dropped,
    }


def _write_section(path, plane, outcome, trace=None) -> None:
    doc = {"plane": plane}
    if trace is not None:
        doc["sections"] = []
        for cone in trace:
            if cone.n_generators == 0:
                continue
            center = cone.generators.mean(axis=0)
            sec = _section_data(cone.generators, center, plane)
            if sec is not None:
                doc["sections"].append(sec)
    cone = getattr(outcome, "cone", None)
    if cone is not None and cone.n_generators:
        center = getattr(outcome, "center", None)
        if center is None:
            center = cone.generators.mean(axis=0)
        doc["final"] = _section_data(cone.generators, center, plane)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def _metadata(args, extra=None) -> dict:
    from dataclasses import asdict

    meta = {
        "version": __version__,
        "tolerances": asdict(_tolerances(args)),
        "seed": getattr(args, "seed", None),
        "budget": getattr(args, "budget", None),
    }
    if extra:
        meta.update(extra)
    return meta


def _emit(args, family, outcome, trace=None, extra_meta=None) -> int:
    """Re-verify, write the outcome file and section data, print a summary."""
    if not isinstance(outcome, (Inconclusive, HalfspaceCone)):
        verify_certificate(family, outcome, _tolerances(args))
    doc = outcome_to_dict(outcome, _metadata(args, extra_meta))
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(doc, fh, indent=1)
    else:
        json.dump(doc, sys.stdout, indent=1)
        sys.stdout.write("\n")
    if args.section and family.dim == 3:
        _write_section(args.section, args.plane, outcome, trace)
    if isinstance(outcome, Inconclusive):
        logger.info("inconclusive after %d iterations: %s",
                    outcome.iterations_used, outcome.reason)
        return EXIT_INCONCLUSIVE
    return EXIT_DEFINITIVE


def _run_family_command(args) -> int:
    try:
        family = read_family(args.family)
    except FamilyFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    tol = _tolerances(args)
    if args.command == "check":
        irreducibility_check(family, tol)
        out = primal_dual(family, budget=args.budget or 50, tol=tol)
        return _emit(args, family, out)
    if args.command == "construct":
        if args.t_scale < 1.0:
            print("error: --t-scale must be at least 1", file=sys.stderr)
            return EXIT_INPUT_ERROR
        run = polyhedral_cone(family, t=args.t_scale, budget=args.budget or 200, tol=tol)
        return _emit(args, family, run.outcome, trace=run.scaled_cones,
                     extra_meta={"t_scale": args.t_scale})
    if args.command == "minimal":
        out = minimal_cone(
            family,
            dual_warmup_iters=args.dual_warmup,
            budget_words=args.budget or 240,
            tol=tol,
        )
        return _emit(args, family, out)
    if args.command == "maximal":
        out = maximal_cone(
            family,
            dual_warmup_iters=args.dual_warmup,
            budget_words=args.budget or 240,
            tol=tol,
        )
        if isinstance(out, HalfspaceCone):
            return _emit(args, family, out)
        return _emit(args, family, out)
    if args.command == "direct":
        run = direct_algorithm(family, budget=args.budget or 50, tol=tol, rng=args.seed)
        return _emit(args, family, run.outcome, trace=run.cones)
    raise AssertionError(f"unhandled command {args.command}")


def _run_bench(args) -> int:
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    study = doc.pop("study", None)
    if study not in ("table1", "lambda", "boolean"):
        print("error: config needs \"study\": table1 | lambda | boolean", file=sys.stderr)
        return EXIT_INPUT_ERROR
    dims = doc.pop("dims", None)
    tolmaster = doc.pop("tol", None)
    if tolmaster is not None:
        doc["tolerances"] = Tolerances.from_master(float(tolmaster))
    os.makedirs(args.output, exist_ok=True)
    try:
        if study == "table1":
            for d in dims or [doc.get("dim", 3)]:
                cfg = ExperimentConfig(**{**doc, "dim": int(d),
                                          "entry_distribution": "normal"})
                summary = random_pair_study(cfg)
                base = os.path.join(args.output, f"table1_d{d}")
                if args.format in ("json", "both"):
                    summary_to_json(summary, base + ".json")
                if args.format in ("csv", "both"):
                    summary_to_csv(summary, base + ".csv")
                fr = summary.fractions
                print(f"d={d}: no_cone {fr['no_cone']:.2f} cone {fr['cone']:.2f} "
                      f"unknown {fr['unknown']:.2f}")
        elif study == "lambda":
            cfg = ExperimentConfig(**{**doc, "entry_distribution": "uniform"})
            bracket = lambda_sweep(cfg)
            path = os.path.join(args.output, "lambda_bracket.json")
            with open(path, "w") as fh:
                json.dump(
                    {
                        "lambda_minus": bracket.lambda_minus,
                        "lambda_plus": bracket.lambda_plus,
                        "width": bracket.width,
                        "records": list(bracket.records),
                    },
                    fh,
                    indent=1,
                )
            print(f"bracket [{bracket.lambda_minus:.6f}, {bracket.lambda_plus:.6f}]")
        else:
            cfg = ExperimentConfig(**{**doc, "entry_distribution": "boolean", "dim": 3})
            summary = boolean_sweep(cfg)
            base = os.path.join(args.output, "boolean_sweep")
            if args.format in ("json", "both"):
                summary_to_json(summary, base + ".json")
            if args.format in ("csv", "both"):
                summary_to_csv(summary, base + ".csv")
            print(f"success rate {summary.metadata['success_rate']:.2f} "
                  f"over {summary.trials} pairs")
    except BracketFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (TypeError, ValueError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return EXIT_DEFINITIVE


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("KONE_LOG", "WARNING").upper(),
        format="%(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    if args.command == "bench":
        return _run_bench(args)
    code = _run_family_command(args)
    if args.command == "check" and code == EXIT_DEFINITIVE:
        # definitive for the disprover means a certified non-existence
        return EXIT_DEFINITIVE
    return code


if __name__ == "__main__":
    sys.exit(main())
