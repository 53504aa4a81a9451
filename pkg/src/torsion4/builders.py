"""Bundled pseudotriangulation constructions: S^3 seeds and lens spaces."""
from __future__ import annotations

import math

from .triangulation import (FACE_CORNERS, Pseudotriangulation, derive_cells,
                            perm_parity)

__all__ = ["two_tets_sphere", "boundary_4_simplex", "lens_space"]


def two_tets_sphere() -> Pseudotriangulation:
    """S^3 as two tetrahedra on vertices {0,1,2,3}, every face cross-glued to
    the face of the same vertex labels in the other tetrahedron."""
    tets = [(0, 1, 2, 3), (1, 0, 2, 3)]
    gluings = []
    for label in range(4):
        k1 = tets[0].index(label)
        k2 = tets[1].index(label)
        src = [tets[0][s] for s in FACE_CORNERS[k1]]
        dst = [tets[1][s] for s in FACE_CORNERS[k2]]
        m = tuple(dst.index(x) for x in src)
        gluings.append(((0, k1), (1, k2), m))
    return derive_cells(tets, gluings)


def boundary_4_simplex() -> Pseudotriangulation:
    """S^3 as the boundary of a 4-simplex on vertices {0,...,4}: facet i is
    the complement of vertex i, alternately reordered for a consistent
    orientation."""
    tets = []
    for i in range(5):
        facet = [v for v in range(5) if v != i]
        if i % 2 == 1:
            facet[0], facet[1] = facet[1], facet[0]
        tets.append(tuple(facet))
    gluings = []
    for i in range(5):
        for j in range(i + 1, 5):
            ki = tets[i].index(j)   # face of facet i missing vertex j
            kj = tets[j].index(i)
            src = [tets[i][s] for s in FACE_CORNERS[ki]]
            dst = [tets[j][s] for s in FACE_CORNERS[kj]]
            m = tuple(dst.index(x) for x in src)
            gluings.append(((i, ki), (j, kj), m))
    return derive_cells(tets, gluings)


def lens_space(p: int, q: int) -> Pseudotriangulation:
    """Lens space L(p, q) as a 4p-tetrahedron pseudotriangulation.

    A solid lens is modelled on a 2p-gon equator E_0..E_{2p-1} with poles N, S
    and centre C; every boundary triangle is coned to C (2p upper и 2p lower
    tetrahedra).  The upper cap triangle (N, E_j, E_{j+1}) is then glued to the
    lower cap triangle (S, E_{j+2q}, E_{j+2q+1}), a 2*pi*q/p twist.  Doubling
    the equator keeps all four vertices of every tetrahedron distinct after
    the quotient: vertex classes are C, (N~S), even E's, odd E's.
    """
    if p < 2 or not 1 <= q < p or math.gcd(p, q) != 1:
        raise ValueError("need p >= 2 and 1 <= q < p with gcd(p, q) = 1")
    m = 2 * p

    # model vertex ids: 0 = C, 1 = N, 2 = S, 3 + j = E_j
    C, N, S = 0, 1, 2

    def E(j):
        return 3 + (j % m)

    # quotient classes: C -> 0, N,S -> 1, even E -> 2, odd E -> 3
    def quotient(v):
        if v == C:
            return 0
        if v in (N, S):
            return 1
        return 2 + (v - 3) % 2

    def model_point(v):
        if v == C:
            return (0.0, 0.0, 0.0)
        if v == N:
            return (0.0, 0.0, 1.0)
        if v == S:
            return (0.0, 0.0, -1.0)
        a = 2.0 * math.pi * (v - 3) / m
        return (math.cos(a), math.sin(a), 0.0)

    def oriented(tet):
        """Model tetrahedron reordered to positive orientation in R^3."""
        pts = [model_point(v) for v in tet]
        u = [tuple(pts[i][k] - pts[0][k] for k in range(3)) for i in (1, 2, 3)]
        det = (u[0][0] * (u[1][1] * u[2][2] - u[1][2] * u[2][1])
               - u[0][1] * (u[1][0] * u[2][2] - u[1][2] * u[2][0])
               + u[0][2] * (u[1][0] * u[2][1] - u[1][1] * u[2][0]))
        tet = list(tet)
        if det < 0:
            tet[0], tet[1] = tet[1], tet[0]
        return tuple(tet)

    model_tets = []
    for j in range(m):
        model_tets.append(oriented((C, N, E(j), E(j + 1))))      # tet j: upper
    for j in range(m):
        model_tets.append(oriented((C, S, E(j), E(j + 1))))      # tet m+j: lower

    def glue_by_model(t1, verts1, t2, verts2):
        """Gluing entry matching model vertices verts1[i] -> verts2[i]."""
        k1 = next(k for k in range(4)
                  if set(model_tets[t1]) - {model_tets[t1][k]} == set(verts1))
        k2 = next(k for k in range(4)
                  if set(model_tets[t2]) - {model_tets[t2][k]} == set(verts2))
        src = [model_tets[t1][s] for s in FACE_CORNERS[k1]]
        dst = [model_tets[t2][s] for s in FACE_CORNERS[k2]]
        corr = dict(zip(verts1, verts2))
        mm = tuple(dst.index(corr[x]) for x in src)
        return ((t1, k1), (t2, k2), mm)

    gluings = []
    for j in range(m):
        jn = (j + 1) % m
        # upper fan: U_j and U_{j+1} share (C, N, E_{j+1})
        gluings.append(glue_by_model(j, (C, N, E(j + 1)),
                                     jn, (C, N, E(j + 1))))
        # lower fan: L_j and L_{j+1} share (C, S, E_{j+1})
        gluings.append(glue_by_model(m + j, (C, S, E(j + 1)),
                                     m + jn, (C, S, E(j + 1))))
        # vertical wall: U_j and L_j share (C, E_j, E_{j+1})
        gluings.append(glue_by_model(j, (C, E(j), E(j + 1)),
                                     m + j, (C, E(j), E(j + 1))))
        # lens identification with the 2q twist
        gluings.append(glue_by_model(
            j, (N, E(j), E(j + 1)),
            m + (j + 2 * q) % m, (S, E(j + 2 * q), E(j + 2 * q + 1))))

    tets = [tuple(quotient(v) for v in tet) for tet in model_tets]
    labels = ("c", "n", "e0", "e1")
    return derive_cells(tets, gluings, vertex_labels=labels)
