"""The based chain complex of geometric differentials.

For an embedded pseudotriangulation this builds the five matrices

    motions -f1-> coordinate differentials -f2-> (dl + dtheta)
            -f3-> deficit rotations -f4-> vertex rotation sums
            -f5-> (total rotation + moment),

whose consecutive products vanish.  f1, f4, f5 are exact linear algebra;
f2 and f3 are exact derivatives obtained with forward-mode jets through the
measurement and frame-transport code in :mod:`torsion4.geometry`.

Deficit rotations are reported as three components per edge against the
edge's orthonormal frame, component order (34, 42, 23): rotation rates in
the (y', z'), (z', x') and (x', y') planes of the frame.  f4 reassembles the
same frames into ambient skew matrices, so the pairing is exact.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .geometry import (Embedding, MetricData, cross4, edge_frame, face_theta,
                       metric_from_embedding, vdot, vnorm, vscale, vsub,
                       edge_holonomy)
from .jets import Jet, seed_variables
from .triangulation import Pseudotriangulation, canonical_signature

__all__ = [
    "SKEW_PAIRS",
    "OMEGA_COMP_LABELS",
    "BasedSpace",
    "LinearMap",
    "GeometricComplex",
    "FrameSpec",
    "build_f1",
    "build_f2",
    "build_f3",
    "build_f4",
    "build_f5",
    "build_complex",
    "check_complex",
    "check_acyclicity",
    "ComplexReport",
    "AcyclicityReport",
]

COMP_EPS = 1e-9
RANK_EPS = 1e-8

# skew 4x4 component order, matching the motion basis (a12, ..., a34)
SKEW_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
# per-edge deficit components: planes (y'z'), (z'x'), (x'y') of the edge frame
OMEGA_COMP_PAIRS = ((2, 3), (3, 1), (1, 2))
OMEGA_COMP_LABELS = (34, 42, 23)


def skew_generator(pair) -> np.ndarray:
    i, j = pair
    m = np.zeros((4, 4))
    m[i, j] = 1.0
    m[j, i] = -1.0
    return m


def skew_to_vec6(m) -> np.ndarray:
    return np.array([m[i, j] for i, j in SKEW_PAIRS])


@dataclass(frozen=True)
class BasedSpace:
    name: str
    labels: tuple

    @property
    def dim(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class LinearMap:
    matrix: np.ndarray
    domain: BasedSpace
    codomain: BasedSpace

    def __post_init__(self):
        assert self.matrix.shape == (self.codomain.dim, self.domain.dim)


@dataclass(frozen=True)
class FrameSpec:
    """Orthonormal 4-frame and the three component planes used to report a
    deficit rotation on one edge.  The default per-edge spec has the first
    axis along the edge and components (34, 42, 23)."""

    frame: np.ndarray
    comp_pairs: tuple = OMEGA_COMP_PAIRS
    comp_labels: tuple = OMEGA_COMP_LABELS


@dataclass(frozen=True)
class GeometricComplex:
    maps: tuple[LinearMap, LinearMap, LinearMap, LinearMap, LinearMap]
    spaces: tuple[BasedSpace, ...]
    provenance: dict = field(compare=False, default_factory=dict)

    @property
    def f1(self):
        return self.maps[0]

    @property
    def f2(self):
        return self.maps[1]

    @property
    def f3(self):
        return self.maps[2]

    @property
    def f4(self):
        return self.maps[3]

    @property
    def f5(self):
        return self.maps[4]

    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)


def make_spaces(pt: Pseudotriangulation, frames=None) -> tuple[BasedSpace, ...]:
    n0, n1, n2 = pt.vertex_count, pt.num_edges, pt.num_faces
    motion = tuple(("motion", "t", i) for i in range(4)) + tuple(
        ("motion", "r", p) for p in SKEW_PAIRS)
    coords = tuple(("coord", v, ax) for v in range(n0) for ax in range(4))
    metric = tuple(("len", e) for e in range(n1)) + tuple(
        ("theta", f) for f in range(n2))
    omega = []
    for e in range(n1):
        labels = OMEGA_COMP_LABELS if frames is None or e not in frames \
            else frames[e].comp_labels
        omega.extend(("omega", e, c) for c in labels)
    rho = tuple(("rho", v, p) for v in range(n0) for p in SKEW_PAIRS)
    albe = tuple(("alpha", p) for p in SKEW_PAIRS) + tuple(
        ("beta", ax) for ax in range(4))
    return (BasedSpace("motions", motion),
            BasedSpace("coords", coords),
            BasedSpace("lengths+thetas", metric),
            BasedSpace("deficits", tuple(omega)),
            BasedSpace("vertex_rotations", rho),
            BasedSpace("total_rotation+moment", albe))


def build_f1(pt: Pseudotriangulation, emb: Embedding, spaces=None) -> LinearMap:
    """Coordinate differentials of all vertices under an infinitesimal
    Euclidean motion: d r_A = dr + A r_A with A antisymmetric."""
    spaces = spaces or make_spaces(pt)
    n0 = pt.vertex_count
    m = np.zeros((4 * n0, 10))
    for v in range(n0):
        r = emb.points[v]
        for ax in range(4):
            m[4 * v + ax, ax] = 1.0
        for col, (i, j) in enumerate(SKEW_PAIRS):
            m[4 * v + i, 4 + col] += r[j]
            m[4 * v + j, 4 + col] -= r[i]
    return LinearMap(m, spaces[0], spaces[1])


def build_f2(pt: Pseudotriangulation, emb: Embedding, spaces=None) -> LinearMap:
    """Exact derivatives of edge lengths and adjacency angles with respect
    to vertex coordinates."""
    spaces = spaces or make_spaces(pt)
    n0, n1, n2 = pt.vertex_count, pt.num_edges, pt.num_faces
    m = np.zeros((n1 + n2, 4 * n0))
    base = [tuple(p) for p in emb.points]

    def jet_coords(vids):
        vids = list(dict.fromkeys(vids))
        flat = [c for v in vids for c in base[v]]
        jets = seed_variables(flat)
        coords = list(base)
        for i, v in enumerate(vids):
            coords[v] = tuple(jets[4 * i:4 * i + 4])
        cols = [4 * v + ax for v in vids for ax in range(4)]
        return coords, cols

    for e, edge in enumerate(pt.edges):
        tail, head = edge.endpoints
        coords, cols = jet_coords([tail, head])
        l = vnorm(vsub(coords[head], coords[tail]))
        m[e, cols] = l.grad
    for f in range(n2):
        a, b, c = pt.face_corner_ids(f)
        d, e_ = pt.face_apex_ids(f)
        coords, cols = jet_coords([e_, a, b, c, d])
        th = face_theta(pt, f, coords)
        if isinstance(th, Jet):
            m[n1 + f, cols] = th.grad
    return LinearMap(m, spaces[1], spaces[2])


def _placement_frame(pt, emb, e, star=None) -> np.ndarray:
    """Ambient images of the canonical placement axes for the star of edge e:
    the orientation-preserving isometry taking the canonical placement of the
    first star tetrahedron onto its embedded position."""
    if star is None:
        star = pt.edge_star(e)
    v = pt.tetrahedra[star[0].tet].vertices
    p, q = star[0].apex_slots
    b, c = star[0].edge_slots
    pB, pC = emb.point(v[b]), emb.point(v[c])
    pA1, pA2 = emb.point(v[p]), emb.point(v[q])
    ew = vscale(1.0 / vnorm(vsub(pC, pB)), vsub(pC, pB))
    r = vsub(pA1, pB)
    r = vsub(r, vscale(vdot(r, ew), ew))
    ex = vscale(1.0 / vnorm(r), r)
    r = vsub(pA2, pB)
    r = vsub(r, vscale(vdot(r, ew), ew))
    r = vsub(r, vscale(vdot(r, ex), ex))
    ey = vscale(1.0 / vnorm(r), r)
    ez = cross4(ew, ex, ey)
    ez = vscale(1.0 / vnorm(ez), ez)
    return np.column_stack([ew, ex, ey, ez])


def default_frames(pt: Pseudotriangulation, emb: Embedding
                   ) -> dict[int, FrameSpec]:
    frames = {}
    for e, edge in enumerate(pt.edges):
        tail, head = edge.endpoints
        frames[e] = FrameSpec(edge_frame(emb.point(tail), emb.point(head)))
    return frames


def _worker_count() -> int:
    """Thread cap from TORSION4_THREADS (0 = one per CPU, unset = serial)."""
    import os
    raw = os.environ.get("TORSION4_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    return (os.cpu_count() or 1) if n == 0 else max(1, n)


def build_f3(pt: Pseudotriangulation, emb: Embedding,
             metric: MetricData | None = None, frames=None,
             spaces=None) -> LinearMap:
    """Derivative of the deficit rotation of every edge with respect to all
    lengths and adjacency angles, at the flat point realized by the
    embedding.  Rows are per-edge components against the edge frames."""
    spaces = spaces or make_spaces(pt, frames)
    if metric is None:
        metric = metric_from_embedding(pt, emb)
    if frames is None:
        frames = default_frames(pt, emb)
    n1, n2 = pt.num_edges, pt.num_faces
    m = np.zeros((3 * n1, n1 + n2))

    def fill_edge(e):
        edge_cells, face_cells = _star_cells(pt, e)
        nvars = len(edge_cells) + len(face_cells)
        vals = [metric.lengths[i] for i in edge_cells]
        vals += [metric.thetas[f] for f in face_cells]
        jets = seed_variables(vals)
        lengths = metric.lengths.astype(object).copy()
        thetas = metric.thetas.astype(object).copy()
        for i, eid in enumerate(edge_cells):
            lengths[eid] = jets[i]
        for i, fid in enumerate(face_cells):
            thetas[fid] = jets[len(edge_cells) + i]
        rot = edge_holonomy(pt, MetricData(lengths, thetas), e)
        grads = np.zeros((4, 4, nvars))
        for i in range(4):
            for j in range(4):
                x = rot[i, j]
                if isinstance(x, Jet):
                    grads[i, j] = x.grad
        grads = (grads - grads.transpose(1, 0, 2)) / 2.0
        g = frames[e].frame.T @ _placement_frame(pt, emb, e)
        framed = np.einsum("ik,kln,jl->ijn", g, grads, g)
        cols = list(edge_cells) + [n1 + f for f in face_cells]
        for ci, (i, j) in enumerate(frames[e].comp_pairs):
            m[3 * e + ci, cols] = framed[i, j]

    workers = _worker_count()
    if workers > 1 and n1 > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_edge, range(n1)))  # disjoint row blocks
    else:
        for e in range(n1):
            fill_edge(e)
    return LinearMap(m, spaces[2], spaces[3])


def _star_cells(pt, e):
    edges, faces = [], []
    seen_e, seen_f = set(), set()
    for entry in pt.edge_star(e):
        for ei in range(6):
            eid = pt.edge_of[(entry.tet, ei)]
            if eid not in seen_e:
                seen_e.add(eid)
                edges.append(eid)
        fid = pt.face_of[(entry.tet, entry.apex_slots[0])]
        if fid not in seen_f:
            seen_f.add(fid)
            faces.append(fid)
    return edges, faces


def build_f4(pt: Pseudotriangulation, emb: Embedding, frames=None,
             spaces=None) -> LinearMap:
    """Sum of deficit rotations over the edges at each vertex, with the sign
    flip between the two ends of an edge; per-edge components are converted
    back to ambient skew matrices through the same frames as in f3."""
    spaces = spaces or make_spaces(pt, frames)
    if frames is None:
        frames = default_frames(pt, emb)
    n0, n1 = pt.vertex_count, pt.num_edges
    m = np.zeros((6 * n0, 3 * n1))
    for e, edge in enumerate(pt.edges):
        tail, head = edge.endpoints
        f = frames[e].frame
        for ci, pair in enumerate(frames[e].comp_pairs):
            amb = f @ skew_generator(pair) @ f.T
            vec = skew_to_vec6(amb)
            m[6 * tail:6 * tail + 6, 3 * e + ci] += vec
            m[6 * head:6 * head + 6, 3 * e + ci] -= vec
    return LinearMap(m, spaces[3], spaces[4])


def build_f5(pt: Pseudotriangulation, emb: Embedding, spaces=None) -> LinearMap:
    """Total rotation and moment of the per-vertex rotation sums:
    d alpha = sum of d rho_A, d beta = sum of d rho_A applied to r_A."""
    spaces = spaces or make_spaces(pt)
    n0 = pt.vertex_count
    m = np.zeros((10, 6 * n0))
    for v in range(n0):
        r = emb.points[v]
        for col, (i, j) in enumerate(SKEW_PAIRS):
            m[col, 6 * v + col] = 1.0
            m[6 + i, 6 * v + col] += r[j]
            m[6 + j, 6 * v + col] -= r[i]
    return LinearMap(m, spaces[4], spaces[5])


def build_complex(pt: Pseudotriangulation, emb: Embedding, frames=None,
                  seed=None) -> GeometricComplex:
    """All five maps for an embedded pseudotriangulation.

    frames may override the deficit-component FrameSpec of selected edges
    (defaults are filled in for the rest).
    """
    all_frames = default_frames(pt, emb)
    if frames:
        all_frames.update(frames)
    spaces = make_spaces(pt, all_frames)
    metric = metric_from_embedding(pt, emb)
    sig = hashlib.sha256(repr(canonical_signature(pt)).encode()).hexdigest()
    prov = {"triangulation": sig[:16], "embedding_seed": seed,
            "differentiation": "forward-mode jets"}
    return GeometricComplex(
        (build_f1(pt, emb, spaces),
         build_f2(pt, emb, spaces),
         build_f3(pt, emb, metric, all_frames, spaces),
         build_f4(pt, emb, all_frames, spaces),
         build_f5(pt, emb, spaces)),
        spaces, prov)


@dataclass(frozen=True)
class ComplexReport:
    norms: tuple[float, float, float, float]
    eps: float

    @property
    def ok(self) -> bool:
        return all(n <= self.eps for n in self.norms)


def check_complex(gc: GeometricComplex, eps: float = COMP_EPS) -> ComplexReport:
    """Normalized max-norms of the four consecutive compositions."""
    norms = []
    for a, b in zip(gc.maps, gc.maps[1:]):
        prod = b.matrix @ a.matrix
        scale = np.linalg.norm(b.matrix) * np.linalg.norm(a.matrix)
        norms.append(float(np.max(np.abs(prod)) / scale) if scale else 0.0)
    return ComplexReport(tuple(norms), eps)


@dataclass(frozen=True)
class AcyclicityReport:
    ranks: tuple[int, int, int, int, int]
    dims: tuple[int, int, int, int, int, int]
    acyclic: bool
    indeterminate: bool
    gaps: tuple[float, ...]

    @property
    def expected_ranks(self):
        """Ranks forced by exactness, folded left to right."""
        out = [10]
        for d in self.dims[1:-1]:
            out.append(d - out[-1])
        return tuple(out)


def check_acyclicity(gc: GeometricComplex, eps: float = RANK_EPS
                     ) -> AcyclicityReport:
    """Numerical ranks via singular values and the exactness bookkeeping.

    A rank decision without a tenfold gap between the last kept and first
    dropped singular value is flagged indeterminate.
    """
    dims = gc.dims()
    assert sum(d * (-1) ** i for i, d in enumerate(dims)) == 0
    ranks, gaps = [], []
    indeterminate = False
    for lm in gc.maps:
        sv = np.linalg.svd(lm.matrix, compute_uv=False)
        top = sv[0] if len(sv) else 0.0
        if top == 0.0:
            ranks.append(0)
            gaps.append(np.inf)
            continue
        r = int(np.sum(sv > eps * top))
        if r < len(sv) and sv[r] > 0:
            gap = sv[r - 1] / sv[r] if r > 0 else np.inf
            if gap < 10.0:
                indeterminate = True
        else:
            gap = np.inf
        ranks.append(r)
        gaps.append(float(gap))
    acyclic = (ranks[0] == 10 and ranks[4] == 10
               and all(ranks[i] + ranks[i + 1] == dims[i + 1]
                       for i in range(4)))
    return AcyclicityReport(tuple(ranks), dims, acyclic and not indeterminate,
                            indeterminate, tuple(gaps))
