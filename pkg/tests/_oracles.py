"""Independent oracles used by the unit and acceptance tests.

Everything here deliberately avoids the jet machinery: derivatives come from
central finite differences of the plain float code paths, so agreement with
the exact builders is a genuine two-route check.
"""
import numpy as np

from torsion4 import complexes as cx
from torsion4.geometry import (Embedding, MetricData, edge_holonomy,
                               metric_from_embedding)


def fd_f2(pt, emb, h=1e-5):
    """Central differences of all lengths and angles in the coordinates."""
    n0 = pt.vertex_count

    def stack(points):
        m = metric_from_embedding(pt, Embedding(points))
        return np.concatenate([m.lengths, m.thetas])

    out = np.zeros((pt.num_edges + pt.num_faces, 4 * n0))
    for v in range(n0):
        for ax in range(4):
            up = emb.points.copy()
            dn = emb.points.copy()
            up[v, ax] += h
            dn[v, ax] -= h
            out[:, 4 * v + ax] = (stack(up) - stack(dn)) / (2 * h)
    return out


def fd_f3(pt, emb, frames, h=1e-6):
    """Central differences of the frame transport, component-converted the
    same way as the exact builder.  The skew projection is the matrix
    logarithm to second order at the flat point."""
    metric = metric_from_embedding(pt, emb)
    n1, n2 = pt.num_edges, pt.num_faces
    out = np.zeros((3 * n1, n1 + n2))
    for e in range(n1):
        ecells, fcells = cx._star_cells(pt, e)
        g = frames[e].frame.T @ cx._placement_frame(pt, emb, e)
        for kind, cells in (("len", ecells), ("theta", fcells)):
            for idx in cells:
                lu, ld = metric.lengths.copy(), metric.lengths.copy()
                tu, td = metric.thetas.copy(), metric.thetas.copy()
                if kind == "len":
                    lu[idx] += h
                    ld[idx] -= h
                else:
                    tu[idx] += h
                    td[idx] -= h
                ru = edge_holonomy(pt, MetricData(lu, tu), e)
                rd = edge_holonomy(pt, MetricData(ld, td), e)
                d = (ru - rd) / (2 * h)
                d = (d - d.T) / 2
                framed = g @ d @ g.T
                col = idx if kind == "len" else n1 + idx
                for ci, (i, j) in enumerate(frames[e].comp_pairs):
                    out[3 * e + ci, col] = framed[i, j]
    return out
