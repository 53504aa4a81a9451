"""Euclidean geometry of simplices in R^4 and frame transport around edges.

All scalar functions accept floats or forward-mode jets, so the exact first
derivatives of any construction here (including the iterative frame transport
in :func:`edge_holonomy`) come out of the same code path.

Adjacency angle convention: for tetrahedra EABC and ABCD glued along ABC, the
angle is theta = sign(V_ABCDE) * (pi - delta), with delta in (0, pi) the
dihedral angle of the 4-simplex ABCDE at the two-face ABC.  Equivalently, in
a positively oriented frame whose last two axes span the orthogonal
complement of the face plane, theta = angle(D) - angle(E) + pi reduced to
(-pi, pi].  Placing an apex at prescribed distances with a prescribed theta
therefore puts it at normal-plane angle psi = angle(previous apex) + theta
- pi, which is the inverse operation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .jets import Jet, atan2, cos, sin, sqrt, value
from .triangulation import EDGE_INDEX, Pseudotriangulation, StarEntry

__all__ = [
    "GeometryError",
    "POSITION_EPS",
    "Embedding",
    "MetricData",
    "edge_length",
    "face_area",
    "tet_volume",
    "oriented_4volume",
    "dihedral_phi",
    "adjacency_theta",
    "place_apex",
    "edge_frame",
    "general_position_violation",
    "random_embedding",
    "metric_from_embedding",
    "edge_holonomy",
]

POSITION_EPS = 1e-9

_AXES = tuple(tuple(1.0 if i == j else 0.0 for j in range(4))
              for i in range(4))


class GeometryError(ValueError):
    """Raised for degenerate or unrealizable geometric data."""


# scalar-generic vector helpers -------------------------------------------------

def vsub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def vadd(p, q):
    return tuple(a + b for a, b in zip(p, q))


def vscale(s, p):
    return tuple(s * a for a in p)


def vdot(p, q):
    return sum(a * b for a, b in zip(p, q))


def vnorm(p):
    return sqrt(vdot(p, p))


def det4(rows):
    """Determinant of a 4x4 matrix given as rows, scalar-generic."""
    (a, b, c, d), (e, f, g, h), (i, j, k, l), (m, n, o, p) = rows
    kp_lo = k * p - l * o
    jp_ln = j * p - l * n
    jo_kn = j * o - k * n
    ip_lm = i * p - l * m
    io_km = i * o - k * m
    in_jm = i * n - j * m
    return (a * (f * kp_lo - g * jp_ln + h * jo_kn)
            - b * (e * kp_lo - g * ip_lm + h * io_km)
            + c * (e * jp_ln - f * ip_lm + h * in_jm)
            - d * (e * jo_kn - f * io_km + g * in_jm))


def cross4(a, b, c):
    """Vector orthogonal to a, b, c with det(rows a, b, c, cross4) > 0."""
    out = []
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        m = [[v[j] for j in cols] for v in (a, b, c)]
        minor = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                 - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                 + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
        out.append(-minor if (3 + i) % 2 == 1 else minor)
    return tuple(out)


# elementary measurements --------------------------------------------------------

def edge_length(p, q):
    """Euclidean distance; raises when the points coincide."""
    d = vsub(q, p)
    n = vnorm(d)
    scale = 1.0 + max(abs(value(x)) for x in itertools.chain(p, q))
    if value(n) <= POSITION_EPS * scale:
        raise GeometryError("degenerate edge: endpoints coincide")
    return n


def face_area(a, b, c):
    """Triangle area via the Gram determinant; raises on collinear input."""
    u, v = vsub(b, a), vsub(c, a)
    uu, vv, uv = vdot(u, u), vdot(v, v), vdot(u, v)
    g = uu * vv - uv * uv
    if value(uu) == 0 or value(g) <= POSITION_EPS ** 2 * value(uu) * value(vv):
        raise GeometryError("degenerate face: collinear vertices")
    return sqrt(g) / 2


def tet_volume(a, b, c, d):
    """Tetrahedron volume via the Gram determinant (always positive)."""
    u, v, w = vsub(b, a), vsub(c, a), vsub(d, a)
    g = [[vdot(x, y) for y in (u, v, w)] for x in (u, v, w)]
    det = (g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
           - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
           + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]))
    norm = value(g[0][0]) * value(g[1][1]) * value(g[2][2])
    if norm == 0 or value(det) <= POSITION_EPS ** 2 * norm:
        raise GeometryError("degenerate tetrahedron: coplanar vertices")
    return sqrt(det) / 6


def oriented_4volume(a, b, c, d, e):
    """Signed 4-simplex volume det(AB; AC; AD; AE) / 24."""
    rows = (vsub(b, a), vsub(c, a), vsub(d, a), vsub(e, a))
    return det4(rows) / 24


def dihedral_phi(points, edge):
    """Inner dihedral angle of a tetrahedron along one of its edges.

    points: the four vertices; edge: pair of local indices.  The two
    remaining vertices are projected onto the complement of the edge
    direction and the angle between the projections is returned, in (0, pi).
    """
    i, j = edge
    k, l = (s for s in range(4) if s not in (i, j))
    u = vsub(points[j], points[i])
    uu = vdot(u, u)
    if value(uu) == 0:
        raise GeometryError("degenerate edge in dihedral angle")

    def perp(x):
        w = vsub(points[x], points[i])
        return vsub(w, vscale(vdot(w, u) / uu, u))

    vk, vl = perp(k), perp(l)
    nk, nl = vnorm(vk), vnorm(vl)
    if value(nk) <= POSITION_EPS or value(nl) <= POSITION_EPS:
        raise GeometryError("degenerate tetrahedron in dihedral angle")
    c = vdot(vk, vl)
    rej = vsub(vl, vscale(c / (nk * nk), vk))
    s = vnorm(rej) * nk
    return atan2(s, c)


# face frames and adjacency angles ----------------------------------------------

def _face_frame(a, b, c):
    """Positively oriented orthonormal frame (e1, e2, n1, n2) with e1, e2
    spanning the plane of triangle abc.  Normal axes are picked from the
    ambient axes by largest residual, a locally constant choice."""
    u = vsub(b, a)
    e1 = vscale(1.0 / vnorm(u), u)
    v = vsub(c, a)
    v = vsub(v, vscale(vdot(v, e1), e1))
    nv = vnorm(v)
    if value(nv) <= POSITION_EPS:
        raise GeometryError("degenerate face frame: collinear corners")
    e2 = vscale(1.0 / nv, v)

    basis = [e1, e2]
    for _ in range(2):
        best, best_norm = None, -1.0
        for axis in _AXES:
            w = axis
            for q in basis:
                w = vsub(w, vscale(vdot(w, q), q))
            n2 = value(vdot(w, w))
            if n2 > best_norm:
                best, best_norm = w, n2
        basis.append(vscale(1.0 / vnorm(best), best))
    e1, e2, n1, n2 = basis
    if value(det4((e1, e2, n1, n2))) < 0:
        n2 = vscale(-1.0, n2)
    return e1, e2, n1, n2


def _wrap_angle(x):
    """Reduce to (-pi, pi]; the shift is constant so derivatives pass through."""
    k = math.floor((math.pi - value(x)) / (2 * math.pi))
    return x + k * (2 * math.pi)


def _theta_formula(e_pt, a, b, c, d_pt):
    """Adjacency angle with no degeneracy checks (jets welcome)."""
    _, _, n1, n2 = _face_frame(a, b, c)
    pd = vsub(d_pt, a)
    pe = vsub(e_pt, a)
    psi_d = atan2(vdot(pd, n2), vdot(pd, n1))
    phi_e = atan2(vdot(pe, n2), vdot(pe, n1))
    return _wrap_angle(psi_d - phi_e + math.pi)


def adjacency_theta(e_pt, a, b, c, d_pt):
    """Signed exterior dihedral angle at face abc between tetrahedra
    (e, a, b, c) and (a, b, c, d); positive iff the oriented 4-volume of
    (a, b, c, d, e) is positive.  Raises on flat configurations."""
    vol = oriented_4volume(a, b, c, d_pt, e_pt)
    rows = (vsub(b, a), vsub(c, a), vsub(d_pt, a), vsub(e_pt, a))
    scale = 1.0
    for r in rows:
        scale *= value(vnorm(r))
    if scale == 0 or abs(value(vol)) * 24 <= POSITION_EPS * scale:
        raise GeometryError(
            "flat configuration: the five vertices span no 4-volume")
    return _theta_formula(e_pt, a, b, c, d_pt)


def _solve_apex_inplane(a, b, c, l_ad, l_bd, l_cd, frame):
    """In-plane coordinates and squared height of an apex at the given
    distances from the corners of face abc."""
    e1, e2 = frame[0], frame[1]
    ab, ac = vsub(b, a), vsub(c, a)
    rhs_b = (l_ad * l_ad + vdot(ab, ab) - l_bd * l_bd) / 2
    rhs_c = (l_ad * l_ad + vdot(ac, ac) - l_cd * l_cd) / 2
    a11 = vdot(ab, e1)
    x1 = rhs_b / a11
    a21, a22 = vdot(ac, e1), vdot(ac, e2)
    x2 = (rhs_c - a21 * x1) / a22
    h2 = l_ad * l_ad - x1 * x1 - x2 * x2
    return x1, x2, h2


def _place_apex(a, b, c, prev, l_ad, l_bd, l_cd, theta):
    frame = _face_frame(a, b, c)
    e1, e2, n1, n2 = frame
    x1, x2, h2 = _solve_apex_inplane(a, b, c, l_ad, l_bd, l_cd, frame)
    if value(h2) <= (POSITION_EPS * value(l_ad)) ** 2:
        raise GeometryError("unrealizable apex distances (flat tetrahedron)")
    h = sqrt(h2)
    pe = vsub(prev, a)
    pn1, pn2 = vdot(pe, n1), vdot(pe, n2)
    if value(pn1) ** 2 + value(pn2) ** 2 <= POSITION_EPS ** 2:
        raise GeometryError("previous apex lies in the face plane")
    phi_p = atan2(pn2, pn1)
    psi = phi_p + theta - math.pi
    disp = vadd(vscale(x1, e1), vscale(x2, e2))
    disp = vadd(disp, vadd(vscale(h * cos(psi), n1), vscale(h * sin(psi), n2)))
    return vadd(a, disp)


def place_apex(a, b, c, prev, l_ad, l_bd, l_cd, theta):
    """Unique point at distances (l_ad, l_bd, l_cd) from a, b, c with the
    prescribed adjacency angle against the previous apex.

    The public entry point insists on |theta| in (0, pi), the range realized
    by embedded configurations; internal transport accepts any real angle.
    """
    if not 0.0 < abs(value(theta)) < math.pi:
        raise GeometryError("adjacency angle must have |theta| in (0, pi)")
    return _place_apex(a, b, c, prev, l_ad, l_bd, l_cd, theta)


def edge_frame(p_tail, p_head) -> np.ndarray:
    """Orthonormal edge frame: first column along the edge, the rest by
    Gram-Schmidt over the ambient axes (near-parallel axes skipped), sign
    fixed to determinant +1.  Float-only; frames are base-point data."""
    w = np.asarray(p_head, dtype=float) - np.asarray(p_tail, dtype=float)
    n = np.linalg.norm(w)
    if n <= POSITION_EPS:
        raise GeometryError("degenerate edge frame")
    cols = [w / n]
    for i in range(4):
        v = np.zeros(4)
        v[i] = 1.0
        for q in cols:
            v = v - (v @ q) * q
        r = np.linalg.norm(v)
        if r < 1e-6:
            continue
        cols.append(v / r)
        if len(cols) == 4:
            break
    f = np.column_stack(cols)
    if np.linalg.det(f) < 0:
        f[:, 3] = -f[:, 3]
    return f


# embeddings ---------------------------------------------------------------------

@dataclass(frozen=True)
class Embedding:
    """Vertex coordinates in R^4, indexed by vertex id."""

    points: np.ndarray  # (N, 4)

    def point(self, v: int) -> tuple[float, float, float, float]:
        return tuple(self.points[v])

    @property
    def count(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class MetricData:
    """Abstract geometrization: one length per edge class, one adjacency
    angle per face class.  Arrays may hold jets (dtype=object) so the same
    transport code yields derivatives."""

    lengths: np.ndarray
    thetas: np.ndarray


def general_position_violation(points, eps: float = POSITION_EPS):
    """First vertex tuple violating general position, or None.

    For five or more vertices: no five in a common hyperplane.  For smaller
    complexes the corresponding lower-dimensional degeneracies are checked.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    m = min(5, n)
    combos = np.array(list(itertools.combinations(range(n), m)))
    d = pts[combos[:, 1:]] - pts[combos[:, :1]]
    sv = np.linalg.svd(d, compute_uv=False)
    scale = np.prod(np.linalg.norm(d, axis=2), axis=1)
    bad = (scale == 0) | (np.prod(sv, axis=1) <= eps * scale)
    idx = np.nonzero(bad)[0]
    if idx.size:
        return tuple(combos[idx[0]])
    return None


def random_embedding(pt: Pseudotriangulation, seed: int,
                     max_retries: int = 200) -> Embedding:
    """Deterministic general-position embedding with coordinates in [-1, 1].

    Vertices violating general position are resampled (largest index in the
    offending tuple), so the result is reproducible from the seed alone.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, size=(pt.vertex_count, 4))
    for _ in range(max_retries):
        bad = general_position_violation(pts)
        if bad is None:
            return Embedding(pts)
        pts[max(bad)] = rng.uniform(-1.0, 1.0, size=4)
    raise GeometryError("random embedding: retry budget exhausted")


def _face_presentation(pt: Pseudotriangulation, f: int):
    """Vertex ids (E, A, B, C, D) presenting face f with both tetrahedra in
    their right orientation; E, D are the side-1 and side-0 apexes."""
    a, b, c = pt.face_corner_ids(f)
    d, e = pt.face_apex_ids(f)
    return e, a, b, c, d


def face_theta(pt: Pseudotriangulation, f: int, coords):
    """Adjacency angle of face f given per-vertex coordinates.

    Faces whose two apexes are the same vertex (mirror pairs, which occur in
    pseudotriangulations) fold back onto themselves: their angle is exactly
    pi, and the formula below returns that with exactly zero derivative.
    """
    e, a, b, c, d = _face_presentation(pt, f)
    return _theta_formula(coords[e], coords[a], coords[b], coords[c],
                          coords[d])


def metric_from_embedding(pt: Pseudotriangulation, emb: Embedding
                          ) -> MetricData:
    """Edge lengths and adjacency angles realized by an embedding."""
    bad = general_position_violation(emb.points)
    if bad is not None:
        raise GeometryError(f"embedding not in general position: {bad}")
    coords = [tuple(p) for p in emb.points]
    lengths = np.empty(pt.num_edges)
    for i, edge in enumerate(pt.edges):
        tail, head = edge.endpoints
        lengths[i] = edge_length(coords[tail], coords[head])
    thetas = np.empty(pt.num_faces)
    for f in range(pt.num_faces):
        thetas[f] = value(face_theta(pt, f, coords))
    return MetricData(lengths, thetas)


# frame transport around an edge --------------------------------------------------

def _star_local_cells(pt: Pseudotriangulation, e: int):
    """Edge classes and crossed face classes feeding the holonomy of edge e."""
    edges = []
    faces = []
    for entry in pt.edge_star(e):
        for ei in range(6):
            eid = pt.edge_of[(entry.tet, ei)]
            if eid not in edges:
                edges.append(eid)
        fid = pt.face_of[(entry.tet, entry.apex_slots[0])]
        if fid not in faces:
            faces.append(fid)
    return edges, faces


def _walk_length(pt, metric, entry: StarEntry, s1: int, s2: int):
    eid = pt.edge_of[(entry.tet, EDGE_INDEX[frozenset((s1, s2))])]
    return metric.lengths[eid]


def reverse_star(star):
    """Star entries for the opposite edge orientation: reversed cycle with
    apex pairs and edge slots swapped (still even arrangements)."""
    return tuple(StarEntry(s.tet, (s.apex_slots[1], s.apex_slots[0]),
                           (s.edge_slots[1], s.edge_slots[0]))
                 for s in reversed(star))


def edge_holonomy(pt: Pseudotriangulation, metric: MetricData, e: int,
                  reverse: bool = False):
    """Rotation accrued by transporting a frame once around the star of edge
    e, reported in the canonical placement frame of the star.

    The first tetrahedron is placed with the edge tail at the origin, head on
    the +w axis, first apex in the wx half-plane (x > 0) and second apex at
    y > 0.  The returned 4x4 matrix maps the final copy of that tetrahedron
    back onto the initial one; it fixes the edge pointwise, so it is identity
    outside the lower-right 3x3 block.  On metric data realized by an
    embedding, the result is the identity to machine precision.

    reverse=True transports around the oppositely oriented edge; expressed
    in a common ambient frame the two infinitesimal deficits are opposite.
    """
    star = pt.edge_star(e)
    if reverse:
        star = reverse_star(star)
    n = len(star)
    l_e = metric.lengths[e]

    def ln(i, which):
        entry = star[i % n]
        p, q = entry.apex_slots
        b, c = entry.edge_slots
        pair = {"12": (p, q), "1b": (p, b), "1c": (p, c),
                "2b": (q, b), "2c": (q, c)}[which]
        return _walk_length(pt, metric, entry, *pair)

    # canonical placement of the first tetrahedron
    zero = (0.0, 0.0, 0.0, 0.0)
    pB, pC = zero, (l_e, 0.0, 0.0, 0.0)
    la1b, la1c = ln(0, "1b"), ln(0, "1c")
    aw = (la1b * la1b + l_e * l_e - la1c * la1c) / (2 * l_e)
    ax2 = la1b * la1b - aw * aw
    if value(ax2) <= 0:
        raise GeometryError("star not realizable: flat first triangle")
    ax = sqrt(ax2)
    pA1 = (aw, ax, 0.0, 0.0)

    la2b, la2c, la21 = ln(0, "2b"), ln(0, "2c"), ln(0, "12")
    w = (la2b * la2b + l_e * l_e - la2c * la2c) / (2 * l_e)
    rhs = (la2b * la2b + la1b * la1b - la21 * la21) / 2
    x = (rhs - aw * w) / ax
    y2 = la2b * la2b - w * w - x * x
    if value(y2) <= 0:
        raise GeometryError("star not realizable: flat first tetrahedron")
    y = sqrt(y2)
    pA2 = (w, x, y, 0.0)

    apexes = [pA1, pA2]
    for k in range(2, n + 2):
        src = star[(k - 2) % n]
        theta = metric.thetas[pt.face_of[(src.tet, src.apex_slots[0])]]
        lengths = (ln(k - 1, "12"), ln(k - 1, "2b"), ln(k - 1, "2c"))
        apexes.append(_place_apex(apexes[k - 1], pB, pC, apexes[k - 2],
                                  *lengths, theta))

    # rotation mapping the re-placed first two apexes back to the originals
    u1 = (ax, 0.0, 0.0)
    u2 = (x, y, 0.0)
    v1 = apexes[n][1:]
    v2 = apexes[n + 1][1:]
    v3 = (v1[1] * v2[2] - v1[2] * v2[1],
          v1[2] * v2[0] - v1[0] * v2[2],
          v1[0] * v2[1] - v1[1] * v2[0])
    # columns of R = V U^{-1} with U = [u1 u2 u1 x u2] lower triangular
    u3z = ax * y
    r1 = vscale(1.0 / ax, v1)
    r2 = vscale(1.0 / y, vsub(v2, vscale(x / ax, v1)))
    r3 = vscale(1.0 / u3z, v3)
    # the deficit rotation maps final to initial: transpose of R
    out = np.empty((4, 4), dtype=object)
    out[:] = 0.0
    out[0, 0] = 1.0
    for i in range(3):
        out[1 + i, 1] = r1[i] * 1.0
        out[1 + i, 2] = r2[i] * 1.0
        out[1 + i, 3] = r3[i] * 1.0
    rot = out.T.copy()
    if not any(isinstance(v, Jet) for v in rot.flat):
        return rot.astype(float)
    return rot
