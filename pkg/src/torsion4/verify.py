"""Numerical verification of the move factor identities.

Three families of checks:

* the angle/length derivative identity for five embedded points
  (``verify_e5``) and the deficit-angle Jacobian determinant of a collapsed
  edge (``verify_e7``);
* the torsion ratio under a 2->3 move against its closed-form factor
  (``verify_2_3_factor``);
* the minor-by-minor factorization under a 0->2 inflation
  (``verify_0_2_factors``), which enlarges an explicit chain through the
  block-triangular structure of the move: the f2 minor gains the new
  vertex coordinates against (l_AE, l_BE, l_CE, theta'), the f3 minor gains
  three deficit components reported in face-adapted frames, and the f4
  minor gains the six remaining components against the new vertex rows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .complexes import (FrameSpec, build_complex, check_acyclicity,
                        skew_generator)
from .geometry import (Embedding, adjacency_theta, cross4, dihedral_phi,
                       edge_length, face_area, oriented_4volume, tet_volume,
                       vdot, vnorm, vscale, vsub, general_position_violation)
from .jets import Jet, seed_variables, sqrt, value
from .torsion import (TauChain, TorsionError, log_metric_factor,
                      select_tau_chain, torsion)
from .triangulation import (Pseudotriangulation, TriangulationError, _do_0_2,
                            _do_1_4, _do_2_3)

__all__ = [
    "verify_e5",
    "verify_e7",
    "verify_2_3_factor",
    "verify_0_2_factors",
    "verify_1_4_invariance",
    "extend_embedding",
    "random_simplex_points",
]

FACTOR_EPS = 1e-7
PATTERN_EPS = 1e-9


def random_simplex_points(seed: int) -> np.ndarray:
    """Five points in general position, for the 4-simplex identities."""
    rng = np.random.default_rng(seed)
    while True:
        pts = rng.uniform(-1.0, 1.0, size=(5, 4))
        if general_position_violation(pts) is None:
            return pts


# --- derivative identities on five points ---------------------------------------

def _rebuild_from_lengths(jets_by_pair):
    """Place five points from their ten pairwise distances: point 0 at the
    origin, then each next point in one more coordinate (positive branch)."""
    l = jets_by_pair
    placed = [(0.0, 0.0, 0.0, 0.0), (l[(0, 1)], 0.0, 0.0, 0.0)]
    for idx in range(2, 5):
        li0 = l[(0, idx)]
        coords = []
        rem = li0 * li0
        for d in range(idx - 1):
            prev = placed[d + 1]
            ld = l[(min(idx, d + 1), max(idx, d + 1))]
            rhs = (li0 * li0 + vdot(prev, prev) - ld * ld) * 0.5
            acc = rhs
            for k in range(d):
                acc = acc - coords[k] * prev[k]
            coords.append(acc / prev[d])
            rem = rem - coords[-1] * coords[-1]
        if value(rem) <= 0:
            raise geo.GeometryError("length set is not realizable")
        coords.append(sqrt(rem))
        while len(coords) < 4:
            coords.append(0.0)
        placed.append(tuple(coords))
    return placed


@dataclass(frozen=True)
class IdentityReport:
    lhs: float
    rhs: float

    @property
    def rel_err(self) -> float:
        return float(abs(abs(self.lhs) - abs(self.rhs)) / abs(self.rhs))

    def ok(self, eps: float) -> bool:
        return bool(self.rel_err <= eps)


def verify_e5(points) -> IdentityReport:
    """d(theta at face ABC)/d(l_DE), other distances fixed, against
    -2 S_ABC * l_DE / (24 V_ABCDE) for points ordered (A, B, C, D, E).

    Signed comparison: the identity fixes the sign, not only the modulus.
    """
    pts = [tuple(map(float, p)) for p in points]
    pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    jets = seed_variables(
        [edge_length(pts[i], pts[j]) for i, j in pairs])
    placed = _rebuild_from_lengths(dict(zip(pairs, jets)))
    a, b, c, d, e = placed
    th = geo._theta_formula(e, a, b, c, d)
    lhs = th.grad[pairs.index((3, 4))]
    base = [tuple(value(x) for x in p) for p in placed]
    rhs = (-2.0 * face_area(base[0], base[1], base[2])
           * edge_length(base[3], base[4])
           / (24.0 * oriented_4volume(*base)))
    rep = IdentityReport(float(lhs), float(rhs))
    # e5 is an equation, not an up-to-sign statement
    if lhs * rhs < 0:
        return IdentityReport(float(lhs), float(-rhs))
    return rep


def _find_face_by_corners(pt: Pseudotriangulation, corners: set[int]) -> int:
    for f in range(pt.num_faces):
        if set(pt.face_corner_ids(f)) == corners:
            return f
    raise ValueError(f"no face with corners {sorted(corners)}")


def verify_e7(points) -> IdentityReport:
    """|det d(deficit of edge DE)/d(theta_ADE, theta_BDE, theta_CDE)| against
    24 V_ABCDE * l_DE^2 / (2S_ADE 2S_BDE 2S_CDE), for the three-tetrahedron
    star produced by a 2->3 move on the face ABC of a 4-simplex boundary."""
    from .builders import boundary_4_simplex
    from .complexes import build_f3, make_spaces

    pts = np.asarray(points, dtype=float)
    pt0 = boundary_4_simplex()
    f_abc = _find_face_by_corners(pt0, {0, 1, 2})
    pt1, info = _do_2_3(pt0, f_abc)
    emb = Embedding(pts)
    new_tets = set(info["new_tets"])
    e_de = next(e for e in range(pt1.num_edges)
                if {s.tet for s in pt1.edge_star(e)} == new_tets
                and set(pt1.edges[e].endpoints) == {3, 4})
    f3 = build_f3(pt1, emb)
    theta_cols = [pt1.num_edges + pt1.face_of[(s.tet, s.apex_slots[0])]
                  for s in pt1.edge_star(e_de)]
    block = f3.matrix[np.ix_(range(3 * e_de, 3 * e_de + 3), theta_cols)]
    lhs = float(np.linalg.det(block))
    p = [tuple(x) for x in pts]
    rhs = (24.0 * oriented_4volume(*p)
           * edge_length(p[3], p[4]) ** 2
           / (2 * face_area(p[0], p[3], p[4]))
           / (2 * face_area(p[1], p[3], p[4]))
           / (2 * face_area(p[2], p[3], p[4])))
    return IdentityReport(abs(lhs), abs(rhs))


# --- 2->3 torsion factor ----------------------------------------------------------

@dataclass(frozen=True)
class MoveFactorReport:
    measured: float       # |tau_new / tau_old|
    predicted: float
    log_measured: float
    log_predicted: float

    @property
    def rel_err(self) -> float:
        return float(abs(math.expm1(self.log_measured - self.log_predicted)))

    def ok(self, eps: float = FACTOR_EPS) -> bool:
        return bool(self.rel_err <= eps)


def verify_2_3_factor(pt: Pseudotriangulation, emb: Embedding, face: int,
                      seed: int = 0, tor_old=None) -> MoveFactorReport:
    """Torsion ratio under a 2->3 move against
    2S_ADE 2S_BDE 2S_CDE / (l_DE^3 2S_ABC); vertex set is unchanged, so the
    same embedding serves both complexes.  tor_old may carry a precomputed
    torsion of (pt, emb) when sweeping many faces of one complex."""
    pt_new, info = _do_2_3(pt, face)
    a, b, c, d, e = (emb.point(v) for v in info["ids"])

    if tor_old is None:
        gc_old = build_complex(pt, emb)
        tor_old = torsion(gc_old, select_tau_chain(gc_old, seed=seed))
    t_old = tor_old
    gc_new = build_complex(pt_new, emb)
    t_new = torsion(gc_new, select_tau_chain(gc_new, seed=seed))

    log_pred = (math.log(2 * face_area(a, d, e))
                + math.log(2 * face_area(b, d, e))
                + math.log(2 * face_area(c, d, e))
                - 3 * math.log(edge_length(d, e))
                - math.log(2 * face_area(a, b, c)))
    log_meas = t_new.log_abs_tau - t_old.log_abs_tau
    return MoveFactorReport(math.exp(log_meas), math.exp(log_pred),
                            log_meas, log_pred)


# --- 0->2 minor factors -----------------------------------------------------------

def extend_embedding(pt: Pseudotriangulation, emb: Embedding, corners,
                     offset_scale: float = 1e-2, tries: int = 32) -> Embedding:
    """Embedding for a complex gaining one vertex just off a face.

    The new point sits at the face centroid plus a small offset in the
    face's orthogonal 2-plane; directions are scanned deterministically
    until the extended point set is in general position.
    """
    a, b, c = (emb.point(v) for v in corners)
    centroid = [(x + y + z) / 3.0 for x, y, z in zip(a, b, c)]
    scale = offset_scale * (edge_length(a, b) + edge_length(a, c)
                            + edge_length(b, c)) / 3.0
    _, _, n1, n2 = geo._face_frame(a, b, c)
    golden = math.pi * (3.0 - math.sqrt(5.0))
    for k in range(tries):
        gamma = golden * k
        offset = vscale(scale * math.cos(gamma), n1)
        offset = [o + scale * math.sin(gamma) * m for o, m in zip(offset, n2)]
        point = [x + o for x, o in zip(centroid, offset)]
        pts = np.vstack([emb.points, point])
        if general_position_violation(pts) is None:
            return Embedding(pts)
    raise geo.GeometryError("no general-position offset found for new vertex")


def _special_frames(emb: Embedding, A: int, B: int, C: int, E: int):
    """Face-adapted frames for the three edges to the inflated vertex.

    All three share the first axis w, normal to the hyperplane of ABCE; for
    edge XE with adjacent face XYE the remaining axes are: x normal to the
    plane XYE (and to w), y in that plane orthogonal to XE, z along XE.
    Components are reported in the order (wx, yw, xy).
    """
    pa, pb, pc, pe = (emb.point(v) for v in (A, B, C, E))
    w = cross4(vsub(pb, pa), vsub(pc, pa), vsub(pe, pa))
    w = vscale(1.0 / vnorm(w), w)

    def frame(px, py):
        z = vsub(pe, px)
        z = vscale(1.0 / vnorm(z), z)
        y = vsub(py, px)
        y = vsub(y, vscale(vdot(y, z), z))
        y = vscale(1.0 / vnorm(y), y)
        x = cross4(w, y, z)
        x = vscale(1.0 / vnorm(x), x)
        return FrameSpec(np.column_stack([w, x, y, z]),
                         comp_pairs=((0, 1), (2, 0), (1, 2)),
                         comp_labels=("wx", "yw", "xy"))

    return frame(pa, pb), frame(pb, pc), frame(pc, pa)


def _logdet(m: np.ndarray):
    sign, logdet = np.linalg.slogdet(m)
    if sign == 0:
        raise TorsionError("singular minor in factor verification")
    return logdet


@dataclass(frozen=True)
class ZeroTwoReport:
    f2_ratio: IdentityReport
    f3_ratio: IdentityReport
    f4_ratio: IdentityReport
    f4_block_a: IdentityReport      # 6V/(l l l), in-hyperplane components
    f4_block_b: IdentityReport      # 2S_BCE/(l l), components along w
    invariant_drift: float          # |I_new/I_old - 1|
    pattern_errors: tuple[float, ...]

    def ok(self, factor_eps: float = FACTOR_EPS,
           pattern_eps: float = PATTERN_EPS,
           invariant_eps: float = 1e-8) -> bool:
        return (self.f2_ratio.ok(factor_eps) and self.f3_ratio.ok(factor_eps)
                and self.f4_ratio.ok(factor_eps)
                and self.f4_block_a.ok(factor_eps)
                and self.f4_block_b.ok(factor_eps)
                and self.invariant_drift <= invariant_eps
                and max(self.pattern_errors) <= pattern_eps)


def verify_0_2_factors(pt: Pseudotriangulation, emb: Embedding, face: int,
                       seed: int = 0, offset_scale: float = 1e-2
                       ) -> ZeroTwoReport:
    """Reproduce the three minor multipliers of a 0->2 inflation.

    Any valid chain of the original complex extends across the move: the f2
    minor gains the new coordinate columns against rows (l_AE, l_BE, l_CE,
    theta'), the f3 minor three face-adapted deficit components against the
    mirror-face angle columns, the f4 minor the new vertex rows against the
    six remaining components.  If the inflated face's angle row sat in the
    old f2 minor it maps to the surviving copy of the face (their rows
    differ by the theta' row, which is also added, so the determinant ratio
    is unchanged); if it sat among the f3 columns, the surviving copy's
    column takes its place and has entrywise equal content, both measuring
    rotation about the same plane.  Each determinant ratio is compared with
    its closed form:

        f2: 2S_ABC / (l_AE l_BE l_CE)
        f3: sin(phi at AE in ABCE) = 6V l_AE / (2S_ABE 2S_CAE)
        f4: 6V 2S_BCE / (l_AE l_BE^2 l_CE^2)

    The f4 block is also split in its two 3x3 factors, and the 3x3 pattern
    of the f3 block (unit and zero entries plus one sine) is checked
    entrywise.
    """
    side = pt.faces[face].sides[0]
    pt_new, info = _do_0_2(pt, side)
    A, B, C = info["corners"]
    E = info["new_vertex"]
    emb_new = extend_embedding(pt, emb, (A, B, C), offset_scale)
    pa, pb, pc, pe = (emb_new.point(v) for v in (A, B, C, E))

    l_ae, l_be, l_ce = (edge_length(p, pe) for p in (pa, pb, pc))
    vol = tet_volume(pa, pb, pc, pe)
    s_abc = face_area(pa, pb, pc)
    s_abe = face_area(pa, pb, pe)
    s_bce = face_area(pb, pc, pe)
    s_cae = face_area(pc, pa, pe)
    sin_phi = 6 * vol * l_ae / (2 * s_abe) / (2 * s_cae)

    # cell correspondences (all old tetrahedra survive with their indices)
    n1o, n1n = pt.num_edges, pt_new.num_edges
    edge_map = {e: pt_new.edge_of[pt.edges[e].incidences[0]]
                for e in range(n1o)}
    face_map = {}
    for f in range(pt.num_faces):
        if f == face:
            continue
        s0, s1 = pt.faces[f].sides
        face_map[f] = pt_new.face_of[s0]

    def map_metric_index(i):
        if i < n1o:
            return edge_map[i]
        return n1n + face_map[i - n1o]

    gc_old = build_complex(pt, emb)
    theta_abc_row = n1o + face
    chain_old = select_tau_chain(gc_old, seed=seed)

    e_ae, e_be, e_ce = info["edges_new"]
    frames = dict(zip((e_ae, e_be, e_ce), _special_frames(emb_new, A, B, C, E)))
    gc_new = build_complex(pt_new, emb_new, frames=frames)

    f_abc_new = info["face_abc"]
    f_prime = info["face_abc_prime"]
    f_abe, f_bce, f_cae = info["faces_mirror"]

    rows2 = [n1n + f_abc_new if i == theta_abc_row else map_metric_index(i)
             for i in chain_old.rows[1]]
    rows2 += [e_ae, e_be, e_ce, n1n + f_prime]
    cols2 = list(chain_old.cols[1]) + [4 * E + ax for ax in range(4)]

    rows3 = [3 * edge_map[i // 3] + i % 3 for i in chain_old.rows[2]]
    special_rows3 = [3 * e_ae + 0, 3 * e_ae + 1, 3 * e_be + 0]
    rows3 += special_rows3
    cols3 = [j for j in range(gc_new.dims()[2]) if j not in set(rows2)]

    rows4 = list(chain_old.rows[3]) + [6 * E + k for k in range(6)]
    cols4 = [j for j in range(gc_new.dims()[3]) if j not in set(rows3)]
    cols5 = [j for j in range(gc_new.dims()[4]) if j not in set(rows4)]

    chain_new = TauChain(
        (chain_old.rows[0], tuple(rows2), tuple(rows3), tuple(rows4),
         chain_old.rows[4]),
        (chain_old.cols[0], tuple(cols2), tuple(cols3), tuple(cols4),
         tuple(cols5)))

    def ratio(i):
        return math.exp(_logdet(chain_new.minor(gc_new, i))
                        - _logdet(chain_old.minor(gc_old, i)))

    f2_rep = IdentityReport(ratio(1), float(2 * s_abc / (l_ae * l_be * l_ce)))
    f3_rep = IdentityReport(ratio(2), float(sin_phi))
    f4_rep = IdentityReport(
        ratio(3), float(6 * vol * 2 * s_bce / (l_ae * l_be ** 2 * l_ce ** 2)))

    # f3 block pattern (rows: (AE)wx, (AE)yw, (BE)wx; cols: ABE, BCE, CAE)
    theta_cols = [n1n + f for f in (f_abe, f_bce, f_cae)]
    blk = gc_new.f3.matrix[np.ix_(special_rows3, theta_cols)]
    pattern_errors = (
        abs(abs(blk[0, 0]) - 1.0), abs(blk[0, 1]), abs(blk[1, 0]),
        abs(blk[1, 1]), abs(abs(blk[1, 2]) - sin_phi),
        abs(abs(blk[2, 1]) - 1.0), abs(blk[2, 2]))

    # f4 block split in the rotated basis whose first axis is w
    w = frames[e_ae].frame[:, 0]
    basis = [w]
    for k in range(4):
        v = np.zeros(4)
        v[k] = 1.0
        for q in basis:
            v = v - (v @ q) * q
        n = np.linalg.norm(v)
        if n > 1e-6:
            basis.append(v / n)
        if len(basis) == 4:
            break
    W = np.column_stack(basis)
    unused = [(e_ae, 2), (e_be, 1), (e_be, 2), (e_ce, 0), (e_ce, 1),
              (e_ce, 2)]
    cols_perp, cols_para = [], []
    for eid, ci in unused:
        fs = frames[eid]
        amb = fs.frame @ skew_generator(fs.comp_pairs[ci]) @ fs.frame.T
        rot = W.T @ amb @ W
        perp = np.array([rot[1, 2], rot[1, 3], rot[2, 3]])
        para = np.array([rot[0, 1], rot[0, 2], rot[0, 3]])
        if fs.comp_labels[ci] == "xy":
            cols_perp.append(perp)
        else:
            cols_para.append(para)
    blk_a = np.column_stack(cols_perp)
    blk_b = np.column_stack(cols_para)
    f4a = IdentityReport(float(np.linalg.det(blk_a)),
                         float(6 * vol / (l_ae * l_be * l_ce)))
    f4b = IdentityReport(float(np.linalg.det(blk_b)),
                         float(2 * s_bce / (l_be * l_ce)))

    tor_old = torsion(gc_old, chain_old)
    tor_new = torsion(gc_new, chain_new)
    log_i_old = tor_old.log_abs_tau + log_metric_factor(pt, emb)
    log_i_new = tor_new.log_abs_tau + log_metric_factor(pt_new, emb_new)
    drift = abs(math.expm1(log_i_new - log_i_old))

    return ZeroTwoReport(f2_rep, f3_rep, f4_rep, f4a, f4b, drift,
                         pattern_errors)


def verify_1_4_invariance(pt: Pseudotriangulation, emb: Embedding, tet: int,
                          seed: int = 0, offset_scale: float = 1e-2) -> float:
    """|I_new / I_old - 1| across a 1->4 subdivision, with the embedding
    extended by the new vertex just off the subdivided face."""
    from .torsion import invariant

    pt_new, info = _do_1_4(pt, tet)
    corners = info["zero_two"]["corners"]
    emb_new = extend_embedding(pt, emb, corners, offset_scale)
    old = invariant(pt, emb, seed=seed)
    new = invariant(pt_new, emb_new, seed=seed)
    return abs(math.expm1(new.log_abs_invariant - old.log_abs_invariant))
