"""Acceptance suite: one check per release criterion, each printing its own
pass/fail line with the measured worst case.  Run with `pytest -v -s
tests/test_acceptance.py` to see the lines."""
import json
import math

import numpy as np
import pytest

from _oracles import fd_f2, fd_f3
from torsion4 import complexes as cx
from torsion4.builders import (boundary_4_simplex, lens_space,
                               two_tets_sphere)
from torsion4.cli import main
from torsion4.complexes import (build_complex, check_acyclicity,
                                check_complex, default_frames, make_spaces)
from torsion4.geometry import metric_from_embedding, random_embedding
from torsion4.torsion import invariant, select_tau_chain, torsion
from torsion4.triangulation import pachner_0_2, pachner_1_4, pachner_2_3
from torsion4.verify import (random_simplex_points, verify_0_2_factors,
                             verify_1_4_invariance, verify_2_3_factor,
                             verify_e5, verify_e7)

BUNDLED = {
    "s3_two_tets": two_tets_sphere(),
    "s3_boundary_4simplex": boundary_4_simplex(),
}


def report(criterion, passed, detail):
    line = f"[criterion {criterion:>2}] {'pass' if passed else 'FAIL'}: {detail}"
    print(line)
    assert passed, line


def movable_faces(pt):
    out = []
    for f in range(pt.num_faces):
        (t1, _), (t2, _) = pt.faces[f].sides
        d, e = pt.face_apex_ids(f)
        if t1 != t2 and d != e:
            out.append(f)
    return out


def test_criterion_01_complex_property():
    """Compositions of neighboring maps vanish, 100 embeddings each."""
    worst = 0.0
    for name, pt in BUNDLED.items():
        for seed in range(100):
            emb = random_embedding(pt, seed)
            rep = check_complex(build_complex(pt, emb))
            worst = max(worst, max(rep.norms))
    report(1, worst <= 1e-9, f"max normalized composition norm {worst:.3e} "
           "over 200 runs")


def test_criterion_02_dimension_bookkeeping():
    """Alternating sum of the six space dimensions is exactly zero."""
    complexes = list(BUNDLED.values())
    complexes += [lens_space(3, 1), lens_space(5, 2),
                  pachner_1_4(BUNDLED["s3_two_tets"], 0),
                  pachner_2_3(BUNDLED["s3_boundary_4simplex"], 0)]
    sums = []
    for pt in complexes:
        dims = tuple(s.dim for s in make_spaces(pt))
        sums.append(sum(d * (-1) ** i for i, d in enumerate(dims)))
    report(2, all(s == 0 for s in sums),
           f"alternating dimension sums {sums} over {len(sums)} complexes")


def test_criterion_03_derivative_oracle():
    """Every f2 and f3 entry against central finite differences."""
    worst_abs, worst_rel = 0.0, 0.0
    for name, pt in BUNDLED.items():
        emb = random_embedding(pt, 23)
        frames = default_frames(pt, emb)
        spaces = make_spaces(pt, frames)
        f2 = cx.build_f2(pt, emb, spaces).matrix
        f3 = cx.build_f3(pt, emb, frames=frames, spaces=spaces).matrix
        for exact, fd in ((f2, fd_f2(pt, emb)), (f3, fd_f3(pt, emb, frames))):
            err = np.abs(exact - fd)
            worst_abs = max(worst_abs, float(err.max()))
            big = np.abs(exact) > 1e-6
            if big.any():
                worst_rel = max(worst_rel, float(
                    (err[big] / np.abs(exact[big])).max()))
    report(3, worst_abs <= 1e-5 and worst_rel <= 1e-6,
           f"worst abs {worst_abs:.3e} (tol 1e-5), "
           f"worst rel {worst_rel:.3e} (tol 1e-6)")


def test_criterion_04_angle_length_derivative():
    """d theta_ABC / d l_DE = -2S l / (24 V) on 50 random 4-simplexes."""
    worst = max(verify_e5(random_simplex_points(seed)).rel_err
                for seed in range(50))
    report(4, worst <= 1e-8, f"max rel err {worst:.3e} over 50 configurations")


def test_criterion_05_deficit_jacobian():
    """det of the collapsed-edge block = +-24 V l^2/(2S 2S 2S), same configs."""
    worst = max(verify_e7(random_simplex_points(seed)).rel_err
                for seed in range(50))
    report(5, worst <= 1e-8, f"max rel err {worst:.3e} over 50 configurations")


def test_criterion_06_two_three_factor():
    """Torsion ratio equals the area/length factor on every movable face,
    10 embeddings per complex."""
    worst, cases = 0.0, 0
    for name, pt in BUNDLED.items():
        faces = movable_faces(pt)
        for seed in range(10):
            emb = random_embedding(pt, 1000 + seed)
            if not faces:
                continue
            gc_old = build_complex(pt, emb)
            tor_old = torsion(gc_old, select_tau_chain(gc_old, seed=seed))
            for f in faces:
                rep = verify_2_3_factor(pt, emb, f, seed=seed,
                                        tor_old=tor_old)
                worst = max(worst, rep.rel_err)
                cases += 1
    report(6, worst <= 1e-8,
           f"max rel err {worst:.3e} over {cases} (face, embedding) pairs; "
           "s3_two_tets has no movable faces (coincident apexes)")


def test_criterion_07_zero_two_factors():
    """Minor multipliers of the 0->2 inflation and |I| under 0->2 / 1->4."""
    worst_factor, worst_inv, cases = 0.0, 0.0, 0
    for name, pt in BUNDLED.items():
        emb = random_embedding(pt, 31)
        for f in range(pt.num_faces):
            rep = verify_0_2_factors(pt, emb, f, seed=3)
            worst_factor = max(worst_factor, rep.f2_ratio.rel_err,
                               rep.f3_ratio.rel_err, rep.f4_ratio.rel_err)
            worst_inv = max(worst_inv, rep.invariant_drift)
            cases += 1
        worst_inv = max(worst_inv, verify_1_4_invariance(pt, emb, 0, seed=3))
    report(7, worst_factor <= 1e-7 and worst_inv <= 1e-8,
           f"max factor err {worst_factor:.3e} (tol 1e-7), max |I| drift "
           f"{worst_inv:.3e} (tol 1e-8) over {cases} faces plus 1->4 moves")


def test_criterion_08_chain_independence():
    """|tau| agrees across >= 10 randomly selected chains per complex."""
    worst = 0.0
    for name, pt in BUNDLED.items():
        emb = random_embedding(pt, 41)
        gc = build_complex(pt, emb)
        values = [torsion(gc, select_tau_chain(gc, seed=s)).abs_tau
                  for s in range(10)]
        worst = max(worst, (max(values) - min(values)) / min(values))
    report(8, worst <= 1e-9, f"max |tau| spread {worst:.3e} across 10 chains "
           "per bundled complex")


def test_criterion_09_fuzz_invariance(tmp_path, capsys):
    """Seeded 20-step random move runs keep |I| constant to 1e-6."""
    from torsion4.io import write_triangulation
    worst = 0.0
    for (name, pt), seed in zip(BUNDLED.items(), (7, 11)):
        path = tmp_path / f"{name}.json"
        write_triangulation(pt, path)
        code = main(["fuzz", str(path), "--steps", "20", "--seed", str(seed),
                     "--tol", "1e-6", "--json"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0 and doc["pass"]
        worst = max(worst, doc["max_rel_deviation"])
    with capsys.disabled():
        report(9, worst <= 1e-6,
               f"max |I| deviation {worst:.3e} over two 20-step runs")


def test_criterion_10_flat_holonomy():
    """Transport around every edge of embedded data is the identity."""
    worst = 0.0
    for name, pt in BUNDLED.items():
        emb = random_embedding(pt, 51)
        metric = metric_from_embedding(pt, emb)
        from torsion4.geometry import edge_holonomy
        for e in range(pt.num_edges):
            rot = edge_holonomy(pt, metric, e)
            worst = max(worst, float(np.max(np.abs(rot - np.eye(4)))))
    report(10, worst <= 1e-10,
           f"max |holonomy - identity| {worst:.3e} over all bundled edges")


def test_criterion_11_embedding_independence():
    """Empirical: |I| agrees across 10 random embeddings (unproved in
    general; a failure here is a finding, reported loudly)."""
    worst = 0.0
    for name, pt in BUNDLED.items():
        vals = [invariant(pt, random_embedding(pt, 60 + s), seed=s
                          ).abs_invariant for s in range(10)]
        worst = max(worst, (max(vals) - min(vals)) / min(vals))
    report(11, worst <= 1e-6,
           f"max |I| spread {worst:.3e} across 10 embeddings per complex")
