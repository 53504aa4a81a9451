"""Command line interface.

Subcommands: validate, invariant, move, fuzz, verify.  Exit codes: 0 ok,
1 check failed, 2 input error, 3 no invariant defined (complex not acyclic),
4 inapplicable move.  All commands are deterministic given the input file and
seed; machine reports (--json) carry no wall-clock data, so equal runs give
byte-equal output (timings go to stderr).
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .complexes import build_complex, check_acyclicity, check_complex
from .geometry import GeometryError, random_embedding
from .io import (FileFormatError, read_embedding, read_triangulation,
                 write_triangulation)
from .torsion import TorsionError, invariant
from .triangulation import (TriangulationError, derive_cells, pachner_0_2,
                            pachner_1_4, pachner_2_3, pachner_3_2,
                            pachner_4_1, validate)
from .verify import (verify_0_2_factors, verify_2_3_factor, verify_e5,
                     verify_e7)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_NO_INVARIANT = 3
EXIT_INAPPLICABLE = 4

COMP_TOL = 1e-9
FACTOR_TOL = 1e-8


def g17(x) -> str:
    return format(float(x), ".17g")


def _emit(doc: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(doc, indent=1, sort_keys=True))
        return
    for key, val in doc.items():
        if isinstance(val, float):
            print(f"{key}: {g17(val)}")
        else:
            print(f"{key}: {val}")


def _load(path):
    try:
        return read_triangulation(path)
    except FileFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def cmd_validate(args) -> int:
    try:
        doc = json.loads(open(args.file).read())
        labels = [str(x) for x in doc["vertices"]]
        tets = [tuple(int(v) for v in row) for row in doc["tetrahedra"]]
        gluings = [(tuple(g["from"]), tuple(g["to"]), tuple(g["map"]))
                   for g in doc["gluings"]]
    except Exception as exc:  # parse errors of any stripe
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        pt = derive_cells(tets, gluings, vertex_labels=labels, strict=False)
    except TriangulationError as exc:
        _emit({"valid": False, "violations": [str(exc)]}, args.json)
        return EXIT_FAIL
    report = validate(pt)
    doc = {"valid": report.ok, "violations": list(report.violations),
           "counts": dict(zip("N0 N1 N2 N3".split(), pt.counts()))}
    if args.json:
        doc["edges"] = [{"id": i, "tail": pt.vertex_labels[e.endpoints[0]],
                         "head": pt.vertex_labels[e.endpoints[1]]}
                        for i, e in enumerate(pt.edges)]
        doc["faces"] = [{"id": f, "corners": [pt.vertex_labels[v] for v in
                                              pt.face_corner_ids(f)],
                         "sides": [list(s) for s in pt.faces[f].sides]}
                        for f in range(pt.num_faces)]
    _emit(doc, args.json)
    return EXIT_OK if report.ok else EXIT_FAIL


def _run_report(pt, emb, seed):
    gc = build_complex(pt, emb, seed=seed)
    comp = check_complex(gc)
    acy = check_acyclicity(gc)
    doc = {
        "counts": dict(zip("N0 N1 N2 N3".split(), pt.counts())),
        "dims": list(gc.dims()),
        "composition_norms": [float(n) for n in comp.norms],
        "complex_ok": comp.ok,
        "ranks": list(acy.ranks),
        "acyclic": acy.acyclic,
        "rank_indeterminate": acy.indeterminate,
        "provenance": gc.provenance,
        "timing": None,
    }
    if not acy.acyclic:
        doc["abs_tau"] = None
        doc["abs_invariant"] = None
        return doc, EXIT_NO_INVARIANT
    res = invariant(pt, emb, seed=seed, gc=gc)
    doc["abs_tau"] = res.torsion.abs_tau
    doc["log_abs_tau"] = res.torsion.log_abs_tau
    doc["abs_invariant"] = res.abs_invariant
    doc["log_abs_invariant"] = res.log_abs_invariant
    doc["chain_min_equilibrated_det"] = res.torsion.min_equilibrated_det
    return doc, EXIT_OK


def cmd_invariant(args) -> int:
    pt = _load(args.file)
    t0 = time.perf_counter()
    try:
        if args.embedding:
            emb = read_embedding(args.embedding, pt)
            seed = None
        else:
            seed = args.seed
            emb = random_embedding(pt, seed)
        doc, code = _run_report(pt, emb, seed if seed is not None else 0)
    except (FileFormatError, GeometryError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TorsionError as exc:
        print(f"no invariant: {exc}", file=sys.stderr)
        return EXIT_NO_INVARIANT
    print(f"elapsed: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    _emit(doc, args.json)
    return code


MOVES = {
    "2-3": (pachner_2_3, "face"),
    "3-2": (pachner_3_2, "edge"),
    "1-4": (pachner_1_4, "tetrahedron"),
    "4-1": (pachner_4_1, "vertex"),
    "0-2": (pachner_0_2, "face"),
}


def cmd_move(args) -> int:
    pt = _load(args.file)
    op, kind = MOVES[args.move]
    try:
        out = op(pt, args.target)
    except TriangulationError as exc:
        print(f"inapplicable move: {exc}", file=sys.stderr)
        return EXIT_INAPPLICABLE
    write_triangulation(out, args.out)
    print(f"{args.move} at {kind} {args.target}: "
          f"N0,N1,N2,N3 = {out.counts()} -> {args.out}", file=sys.stderr)
    return EXIT_OK


def _applicable_moves(pt):
    """Deterministic list of (move name, target) pairs that succeed."""
    out = []
    for name, (op, _) in MOVES.items():
        counts = {"2-3": pt.num_faces, "0-2": pt.num_faces,
                  "3-2": pt.num_edges, "1-4": pt.num_tets,
                  "4-1": pt.vertex_count}[name]
        for target in range(counts):
            try:
                op(pt, target)
            except TriangulationError:
                continue
            out.append((name, target))
    return out


def cmd_fuzz(args) -> int:
    pt = _load(args.file)
    rng = np.random.default_rng(args.seed)

    def measure(pt_, step_seed):
        emb = random_embedding(pt_, step_seed)
        try:
            res = invariant(pt_, emb, seed=step_seed)
            return res.abs_invariant, True
        except TorsionError:
            return None, False

    trace = []
    seed0 = int(rng.integers(2 ** 31))
    i0, ok0 = measure(pt, seed0)
    trace.append({"step": 0, "move": None, "target": None,
                  "embedding_seed": seed0, "abs_invariant": i0,
                  "acyclic": ok0, "N3": pt.num_tets})
    worst = 0.0
    failures = 0
    for step in range(1, args.steps + 1):
        step_seed = int(rng.integers(2 ** 31))
        cands = _applicable_moves(pt)
        shrink_bias = 8.0 if pt.num_tets >= 24 else 1.0
        weights = np.array([shrink_bias if m in ("3-2", "4-1") else 1.0
                            for m, _ in cands])
        pick = int(rng.choice(len(cands), p=weights / weights.sum()))
        name, target = cands[pick]
        pt = MOVES[name][0](pt, target)
        val, ok = measure(pt, step_seed)
        trace.append({"step": step, "move": name, "target": target,
                      "embedding_seed": step_seed, "abs_invariant": val,
                      "acyclic": ok, "N3": pt.num_tets})
        if not ok:
            failures += 1
        elif i0 is not None:
            worst = max(worst, abs(val / i0 - 1.0))
    passed = worst <= args.tol and failures == 0 and i0 is not None
    doc = {"steps": args.steps, "seed": args.seed, "tol": args.tol,
           "max_rel_deviation": worst, "acyclicity_failures": failures,
           "pass": passed, "trace": trace}
    _emit(doc if args.json else
          {k: doc[k] for k in ("steps", "seed", "tol", "max_rel_deviation",
                               "acyclicity_failures", "pass")}, args.json)
    return EXIT_OK if passed else EXIT_FAIL


def _movable_faces(pt):
    out = []
    for f in range(pt.num_faces):
        (t1, _), (t2, _) = pt.faces[f].sides
        d, e = pt.face_apex_ids(f)
        if t1 != t2 and d != e:
            out.append(f)
    return out


def cmd_verify(args) -> int:
    pt = _load(args.file)
    emb = random_embedding(pt, args.seed)
    cases = []
    if args.theorem == "complex":
        gc = build_complex(pt, emb, seed=args.seed)
        comp = check_complex(gc)
        acy = check_acyclicity(gc)
        for name, n in zip(("f2f1", "f3f2", "f4f3", "f5f4"), comp.norms):
            cases.append({"case": name, "value": float(n),
                          "pass": n <= COMP_TOL})
        cases.append({"case": "acyclic", "value": list(acy.ranks),
                      "pass": acy.acyclic})
    elif args.theorem == "2-3":
        for f in _movable_faces(pt):
            rep = verify_2_3_factor(pt, emb, f, seed=args.seed)
            cases.append({"case": f"face {f}", "measured": rep.measured,
                          "predicted": rep.predicted,
                          "rel_err": rep.rel_err,
                          "pass": rep.ok(FACTOR_TOL)})
    elif args.theorem == "0-2":
        for f in range(pt.num_faces):
            rep = verify_0_2_factors(pt, emb, f, seed=args.seed)
            cases.append({
                "case": f"face {f}",
                "f2": rep.f2_ratio.rel_err, "f3": rep.f3_ratio.rel_err,
                "f4": rep.f4_ratio.rel_err,
                "invariant_drift": rep.invariant_drift,
                "pattern_err": max(rep.pattern_errors),
                "pass": rep.ok()})
    elif args.theorem in ("e5", "e7"):
        fn = verify_e5 if args.theorem == "e5" else verify_e7
        for f in _movable_faces(pt):
            e_, a, b, c = (pt.face_apex_ids(f)[1],) + pt.face_corner_ids(f)
            d = pt.face_apex_ids(f)[0]
            pts5 = np.array([emb.point(v) for v in (a, b, c, d, e_)])
            rep = fn(pts5)
            cases.append({"case": f"face {f}", "lhs": rep.lhs,
                          "rhs": rep.rhs, "rel_err": rep.rel_err,
                          "pass": rep.ok(FACTOR_TOL)})
    ok = all(c["pass"] for c in cases)
    if args.json:
        _emit({"theorem": args.theorem, "cases": cases, "pass": ok}, True)
    else:
        for c in cases:
            flag = "pass" if c["pass"] else "FAIL"
            detail = {k: (g17(v) if isinstance(v, float) else v)
                      for k, v in c.items() if k not in ("case", "pass")}
            print(f"[{flag}] {c['case']}: {detail}")
        print(f"verify {args.theorem}: "
              f"{'all pass' if ok else 'FAILURES'} ({len(cases)} cases)")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="torsion4",
        description="Torsion invariant of pseudotriangulated 3-manifolds "
                    "geometrized in Euclidean R^4.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a triangulation file")
    v.add_argument("file")
    v.add_argument("--json", action="store_true")
    v.set_defaults(fn=cmd_validate)

    i = sub.add_parser("invariant", help="compute |tau| and |I|")
    i.add_argument("file")
    group = i.add_mutually_exclusive_group()
    group.add_argument("--seed", type=int, default=0,
                       help="random embedding seed (default 0)")
    group.add_argument("--embedding", help="embedding JSON file")
    i.add_argument("--json", action="store_true")
    i.set_defaults(fn=cmd_invariant)

    m = sub.add_parser("move", help="apply a local move")
    m.add_argument("file")
    m.add_argument("move", choices=sorted(MOVES))
    m.add_argument("target", type=int, help="cell id (see validate --json)")
    m.add_argument("--out", required=True)
    m.set_defaults(fn=cmd_move)

    f = sub.add_parser("fuzz", help="random move sequences, |I| drift check")
    f.add_argument("file")
    f.add_argument("--steps", type=int, default=20)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--tol", type=float, default=1e-6)
    f.add_argument("--json", action="store_true")
    f.set_defaults(fn=cmd_fuzz)

    w = sub.add_parser("verify", help="verify the factor identities")
    w.add_argument("file")
    w.add_argument("theorem", choices=("complex", "2-3", "0-2", "e5", "e7"))
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--json", action="store_true")
    w.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as exc:  # input-error path of _load
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
