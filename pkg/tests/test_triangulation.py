import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torsion4 import triangulation as tri
from torsion4.builders import boundary_4_simplex, lens_space, two_tets_sphere
from torsion4.triangulation import (TriangulationError, canonical_signature,
                                    derive_cells, is_isomorphic, pachner_0_2,
                                    pachner_1_4, pachner_2_3, pachner_3_2,
                                    pachner_4_1, validate)


def euler_ok(pt):
    n0, n1, n2, n3 = pt.counts()
    return n2 == 2 * n3 and n0 - n1 + n2 - n3 == 0


class TestDeriveCells:
    def test_two_tets_counts(self, two_tets):
        assert two_tets.counts() == (4, 6, 4, 2)

    def test_boundary_4_simplex_counts(self, bd4):
        assert bd4.counts() == (5, 10, 10, 5)

    def test_unglued_face_is_rejected(self, two_tets):
        gluings = list(two_tets.gluings)[:-2]
        with pytest.raises(TriangulationError, match="not closed"):
            derive_cells([t.vertices for t in two_tets.tetrahedra], gluings)

    def test_double_gluing_is_rejected(self, two_tets):
        gluings = list(two_tets.gluings)
        bad = tri.FaceGluing(gluings[0].source, gluings[1].target, (0, 1, 2))
        with pytest.raises(TriangulationError, match="glued twice"):
            derive_cells([t.vertices for t in two_tets.tetrahedra],
                         gluings + [bad])


class TestValidate:
    def test_bundled_complexes_are_valid(self, bundled):
        for pt in bundled.values():
            assert validate(pt).ok

    def test_repeated_vertex_is_reported(self):
        tets = [(0, 0, 1, 2), (0, 0, 1, 2)]
        gluings = [((0, k), (1, k), (0, 1, 2)) for k in range(4)]
        bad = derive_cells(tets, gluings, strict=False)
        report = validate(bad)
        assert any("repeated vertex" in v for v in report.violations)

    def test_orientation_violation_is_reported(self, two_tets):
        # break one gluing's corner map parity (swapping two corners keeps
        # the vertex sets apart, so only the orientation check can object)
        tets = [(0, 1, 2, 3), (0, 1, 2, 3)]
        gluings = []
        for k in range(4):
            gluings.append(((0, k), (1, k), (0, 1, 2)))
        bad = derive_cells(tets, gluings, strict=False)
        report = validate(bad)
        assert any("orientation" in v for v in report.violations)


class TestEdgeStars:
    def test_two_tets_stars_have_length_two(self, two_tets):
        for e in range(two_tets.num_edges):
            assert len(two_tets.edge_star(e)) == 2

    def test_boundary_stars_have_length_three(self, bd4):
        for e in range(bd4.num_edges):
            assert len(bd4.edge_star(e)) == 3

    def test_star_entries_are_even_and_chained(self, bd4):
        for e in range(bd4.num_edges):
            star = bd4.edge_star(e)
            for s in star:
                order = s.apex_slots + s.edge_slots
                assert tri.perm_parity(order) == 1
            for s, t in zip(star, star[1:] + star[:1]):
                # consecutive entries share the apex across the crossed face
                v1 = bd4.tetrahedra[s.tet].vertices[s.apex_slots[1]]
                v2 = bd4.tetrahedra[t.tet].vertices[t.apex_slots[0]]
                assert v1 == v2

    def test_new_edge_after_2_3_has_three_new_tets(self, bd4):
        out, info = tri._do_2_3(bd4, 0)
        star_tets = None
        for e in range(out.num_edges):
            star = out.edge_star(e)
            if {s.tet for s in star} == set(info["new_tets"]):
                assert len(star) == 3
                star_tets = {s.tet for s in star}
        assert star_tets == set(info["new_tets"])


class TestPachner23:
    def test_counts_on_boundary_4_simplex(self, bd4):
        out = pachner_2_3(bd4, 3)
        assert out.counts() == (5, 11, 12, 6)
        assert validate(out).ok

    def test_two_tets_face_has_coincident_apexes(self, two_tets):
        # in the two-tetrahedron sphere every face sees the same vertex on
        # both sides, so no face admits the move
        for f in range(two_tets.num_faces):
            with pytest.raises(TriangulationError, match="coincide"):
                pachner_2_3(two_tets, f)

    def test_round_trip_is_isomorphic(self, bd4):
        out, info = tri._do_2_3(bd4, 7)
        e_new = next(e for e in range(out.num_edges)
                     if {s.tet for s in out.edge_star(e)}
                     == set(info["new_tets"]))
        back = pachner_3_2(out, e_new)
        assert is_isomorphic(back, bd4)


class TestPachner32:
    def test_short_star_is_rejected(self, two_tets):
        for e in range(two_tets.num_edges):
            with pytest.raises(TriangulationError, match="length 2"):
                pachner_3_2(two_tets, e)

    def test_long_star_is_rejected(self):
        pt = lens_space(3, 1)
        e = next(e for e in range(pt.num_edges)
                 if len(pt.edge_star(e)) != 3)
        with pytest.raises(TriangulationError):
            pachner_3_2(pt, e)


class TestPachner14:
    def test_counts(self, two_tets, bd4):
        out = pachner_1_4(two_tets, 0)
        assert (out.vertex_count, out.num_tets) == (5, 5)
        assert out.counts() == (5, 10, 10, 5)
        out2 = pachner_1_4(bd4, 1)
        assert out2.counts() == (6, 14, 16, 8)
        assert validate(out2).ok

    def test_round_trip(self, bd4):
        out = pachner_1_4(bd4, 4, label="middle")
        assert "middle" in out.vertex_labels
        back = pachner_4_1(out, 5)
        assert is_isomorphic(back, bd4)

    def test_equals_0_2_then_2_3(self, bd4):
        mid, info = tri._do_0_2(bd4, (2, 3))
        composed = pachner_2_3(mid, info["face_abc_prime"])
        assert is_isomorphic(composed, pachner_1_4(bd4, 2))


class TestPachner41:
    def test_requires_cone_of_four(self, two_tets, bd4):
        for v in range(two_tets.vertex_count):
            with pytest.raises(TriangulationError):
                pachner_4_1(two_tets, v)
        # every vertex of the 4-simplex boundary meets 4 tetrahedra but the
        # link is the whole boundary of the complement tetrahedron: legal
        out = pachner_4_1(bd4, 0)
        assert out.counts() == (4, 6, 4, 2)
        assert is_isomorphic(out, two_tets_sphere())


class TestPachner02:
    def test_counts_and_validity(self, two_tets):
        out = pachner_0_2(two_tets, 0, label="E")
        assert out.counts() == (5, 9, 8, 4)
        assert validate(out).ok
        assert out.vertex_labels[-1] == "E"

    def test_mirror_pair_structure(self, two_tets):
        out, info = tri._do_0_2(two_tets, two_tets.faces[1].sides[0])
        for e in info["edges_new"]:
            assert len(out.edge_star(e)) == 2
        for f in info["faces_mirror"]:
            d, e_ = out.face_apex_ids(f)
            assert d == e_


class TestIsomorphism:
    def test_relabelled_complex_is_isomorphic(self, bd4):
        rng = np.random.default_rng(0)
        perm = rng.permutation(bd4.vertex_count)
        order = rng.permutation(bd4.num_tets)
        inv_order = np.argsort(order)
        tets = []
        for t in order:
            vs = [int(perm[v]) for v in bd4.tetrahedra[t].vertices]
            vs[0], vs[1] = vs[1], vs[0]  # even? no: swap twice below
            vs[2], vs[3] = vs[3], vs[2]  # double swap keeps orientation
            tets.append(tuple(vs))
        slot = {0: 1, 1: 0, 2: 3, 3: 2}
        gluings = []
        for g in bd4.gluings:
            (t1, k1), (t2, k2) = g.source, g.target
            nk1, nk2 = slot[k1], slot[k2]
            src = [tets[inv_order[t1]][s] for s in tri.FACE_CORNERS[nk1]]
            dst = [tets[inv_order[t2]][s] for s in tri.FACE_CORNERS[nk2]]
            m = tuple(dst.index(x) for x in src)
            gluings.append(((int(inv_order[t1]), nk1),
                            (int(inv_order[t2]), nk2), m))
        relabelled = derive_cells(tets, gluings)
        assert is_isomorphic(relabelled, bd4)
        assert canonical_signature(relabelled) == canonical_signature(bd4)

    def test_distinguishes_manifolds(self, two_tets, bd4):
        assert not is_isomorphic(two_tets, bd4)
        assert not is_isomorphic(lens_space(5, 1), lens_space(5, 2))


class TestLensSpaces:
    @pytest.mark.parametrize("p,q", [(2, 1), (3, 1), (4, 1), (5, 2), (7, 3)])
    def test_valid_and_counts(self, p, q):
        pt = lens_space(p, q)
        assert pt.num_tets == 4 * p
        assert pt.vertex_count == 4
        assert validate(pt).ok

    def test_parameter_checks(self):
        for p, q in [(1, 1), (4, 2), (5, 0), (5, 5)]:
            with pytest.raises(ValueError):
                lens_space(p, q)


MOVE_KINDS = ("2-3", "3-2", "1-4", "4-1", "0-2")


def applicable_targets(pt, kind):
    counts = {"2-3": pt.num_faces, "0-2": pt.num_faces,
              "3-2": pt.num_edges, "1-4": pt.num_tets,
              "4-1": pt.vertex_count}[kind]
    op = {"2-3": pachner_2_3, "3-2": pachner_3_2, "1-4": pachner_1_4,
          "4-1": pachner_4_1, "0-2": pachner_0_2}[kind]
    out = []
    for target in range(counts):
        try:
            res = op(pt, target)
        except TriangulationError:
            continue
        out.append((target, res))
    return out


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_move_sequences_stay_valid(seed):
    rng = np.random.default_rng(seed)
    pt = two_tets_sphere() if seed % 2 else boundary_4_simplex()
    for _ in range(4):
        kind = MOVE_KINDS[rng.integers(len(MOVE_KINDS))]
        options = applicable_targets(pt, kind)
        if not options:
            continue
        _, pt = options[rng.integers(len(options))]
        assert euler_ok(pt)
        assert validate(pt).ok
