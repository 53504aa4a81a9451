import math

import numpy as np
import pytest

from torsion4 import complexes as cx
from torsion4 import geometry as geo
from torsion4.builders import lens_space
from torsion4.geometry import (MetricData, edge_holonomy,
                               metric_from_embedding, random_embedding,
                               reverse_star)
from torsion4.jets import Jet


def jet_skew(rot):
    g = np.zeros((4, 4))
    for i in range(4):
        for j in range(4):
            if isinstance(rot[i, j], Jet):
                g[i, j] = rot[i, j].grad[0]
    return (g - g.T) / 2


class TestFlatHolonomy:
    def test_identity_on_embedded_metric(self, bundled):
        for pt in bundled.values():
            emb = random_embedding(pt, 5)
            metric = metric_from_embedding(pt, emb)
            for e in range(pt.num_edges):
                rot = edge_holonomy(pt, metric, e)
                assert np.max(np.abs(rot - np.eye(4))) < 1e-10

    def test_identity_on_lens_space(self):
        pt = lens_space(3, 1)
        emb = random_embedding(pt, 1)
        metric = metric_from_embedding(pt, emb)
        for e in range(pt.num_edges):
            rot = edge_holonomy(pt, metric, e)
            assert np.max(np.abs(rot - np.eye(4))) < 1e-10

    def test_mirror_faces_carry_angle_pi(self, two_tets):
        emb = random_embedding(two_tets, 3)
        metric = metric_from_embedding(two_tets, emb)
        assert np.allclose(metric.thetas, math.pi)

    def test_degenerate_embedding_is_rejected(self, two_tets):
        pts = np.zeros((4, 4))
        pts[1, 0] = pts[2, 1] = pts[3, 2] = 1.0  # all in one hyperplane
        with pytest.raises(geo.GeometryError):
            metric_from_embedding(two_tets, geo.Embedding(pts))

    def test_symmetric_embedding_has_equal_angles(self, bd4):
        # the five 4-simplex vertices: all adjacency angles equal in size
        c = (1 - math.sqrt(5)) / 4
        pts = np.vstack([np.eye(4), np.full(4, c)])
        metric = metric_from_embedding(bd4, geo.Embedding(pts))
        assert np.allclose(np.abs(metric.thetas), np.abs(metric.thetas[0]))


class TestPerturbedHolonomy:
    def test_single_angle_perturbation_rotates_by_epsilon(self, bd4):
        emb = random_embedding(bd4, 7)
        metric = metric_from_embedding(bd4, emb)
        e = 0
        star = bd4.edge_star(e)
        f = bd4.face_of[(star[0].tet, star[0].apex_slots[0])]
        eps = 1e-6
        thetas = metric.thetas.copy()
        thetas[f] += eps
        rot = edge_holonomy(bd4, MetricData(metric.lengths, thetas), e)
        # matrix-log oracle: rotation angle from the trace, block fixes w
        angle = math.acos(min(1.0, (np.trace(rot) - 2) / 2))
        assert angle == pytest.approx(eps, rel=1e-3)

    def test_jet_derivative_is_unit_generator_about_face_plane(self, bd4):
        emb = random_embedding(bd4, 7)
        metric = metric_from_embedding(bd4, emb)
        e = 2
        star = bd4.edge_star(e)
        f = bd4.face_of[(star[1].tet, star[1].apex_slots[0])]
        thetas = metric.thetas.astype(object).copy()
        thetas[f] = Jet(metric.thetas[f], np.array([1.0]))
        rot = edge_holonomy(
            bd4, MetricData(metric.lengths.astype(object), thetas), e)
        skew = jet_skew(rot)
        amb = cx._placement_frame(bd4, emb, e) @ skew \
            @ cx._placement_frame(bd4, emb, e).T
        a, b, c = (emb.point(v) for v in bd4.face_corner_ids(f))
        _, _, n1, n2 = geo._face_frame(a, b, c)
        gen = np.outer(n1, n2) - np.outer(n2, n1)
        assert min(np.max(np.abs(amb - gen)),
                   np.max(np.abs(amb + gen))) < 1e-12
        assert np.linalg.norm([skew[2, 3], skew[3, 1], skew[1, 2]]) \
            == pytest.approx(1.0)

    def test_orientation_reversal_negates_components(self, bd4):
        emb = random_embedding(bd4, 2)
        metric = metric_from_embedding(bd4, emb)
        e = 1
        ecells, fcells = cx._star_cells(bd4, e)
        for kind, idx in (("len", ecells[2]), ("theta", fcells[0])):
            lengths = metric.lengths.astype(object).copy()
            thetas = metric.thetas.astype(object).copy()
            if kind == "len":
                lengths[idx] = Jet(metric.lengths[idx], np.array([1.0]))
            else:
                thetas[idx] = Jet(metric.thetas[idx], np.array([1.0]))
            md = MetricData(lengths, thetas)
            ambient = {}
            for rev in (False, True):
                star = bd4.edge_star(e)
                if rev:
                    star = reverse_star(star)
                frame = cx._placement_frame(bd4, emb, e, star=star)
                ambient[rev] = frame @ jet_skew(
                    edge_holonomy(bd4, md, e, reverse=rev)) @ frame.T
            assert np.max(np.abs(ambient[False] + ambient[True])) < 1e-12

    def test_unrealizable_metric_is_rejected(self, two_tets):
        emb = random_embedding(two_tets, 3)
        metric = metric_from_embedding(two_tets, emb)
        lengths = metric.lengths.copy()
        lengths[0] = 100.0  # violates the triangle inequalities in the star
        with pytest.raises(geo.GeometryError):
            edge_holonomy(two_tets, MetricData(lengths, metric.thetas), 0)
