"""Pseudotriangulations of closed oriented 3-manifolds and their local moves.

Cells other than tetrahedra are *not* determined by their vertex sets, so
edges and two-faces are stored as equivalence classes of (tetrahedron, local
slot) incidences under the face gluings.  Local face k of a tetrahedron is
the face opposite local vertex k, with its three corners listed in increasing
slot order.  A gluing identifies corners carrying equal global vertex ids and
must reverse the induced boundary orientation, so that all tetrahedra stay
consistently oriented.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

__all__ = [
    "TriangulationError",
    "Tetrahedron",
    "FaceGluing",
    "Edge",
    "Face",
    "StarEntry",
    "ValidationReport",
    "Pseudotriangulation",
    "derive_cells",
    "validate",
    "edge_star",
    "canonical_signature",
    "is_isomorphic",
    "pachner_2_3",
    "pachner_3_2",
    "pachner_1_4",
    "pachner_4_1",
    "pachner_0_2",
]

# Corners of local face k (the face opposite local vertex k), ascending slots.
FACE_CORNERS = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))
# Local edges as ascending slot pairs.
EDGE_SLOTS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {frozenset(p): i for i, p in enumerate(EDGE_SLOTS)}

_PARITY_CACHE: dict[tuple, int] = {}


def perm_parity(seq) -> int:
    """+1 for an even arrangement of distinct comparable items, -1 for odd."""
    key = tuple(seq)
    cached = _PARITY_CACHE.get(key)
    if cached is not None:
        return cached
    items = list(seq)
    sign = 1
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    if len(key) <= 4:
        _PARITY_CACHE[key] = sign
    return sign


class TriangulationError(ValueError):
    """Raised for malformed gluing data or inapplicable moves."""


@dataclass(frozen=True)
class Tetrahedron:
    """Ordered vertex 4-tuple; the ordering fixes the orientation up to even
    permutations."""

    vertices: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.vertices) != 4:
            raise TriangulationError("tetrahedron needs exactly 4 vertices")


@dataclass(frozen=True)
class FaceGluing:
    """Identification of local face `source` with local face `target`.

    corner_map sends corner position i of the source face (positions follow
    FACE_CORNERS order) to corner position corner_map[i] of the target face.
    """

    source: tuple[int, int]
    target: tuple[int, int]
    corner_map: tuple[int, int, int]


@dataclass(frozen=True)
class Edge:
    """Edge class.  endpoints is the canonical orientation (tail, head) taken
    from the lexicographically least incidence."""

    endpoints: tuple[int, int]
    incidences: tuple[tuple[int, int], ...]  # (tet, local edge index)


@dataclass(frozen=True)
class Face:
    """Two-face class with its two (tet, local face) sides, lex ordered."""

    sides: tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True)
class StarEntry:
    """One tetrahedron of an edge star, in traversal order.

    Slots are local: the tetrahedron reads (apex1, apex2, tail, head) as an
    even rearrangement of its stored vertex order, with (tail, head) the
    oriented edge.  Consecutive entries share apex2 -> apex1 across the face
    opposite apex1.
    """

    tet: int
    apex_slots: tuple[int, int]
    edge_slots: tuple[int, int]


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _full_perm(k: int, k2: int, corner_map) -> tuple[int, int, int, int]:
    """Extend a face gluing to a permutation of all four local slots."""
    sigma = [None] * 4
    sigma[k] = k2
    src, dst = FACE_CORNERS[k], FACE_CORNERS[k2]
    for i, s in enumerate(src):
        sigma[s] = dst[corner_map[i]]
    return tuple(sigma)


def _corner_perm(old_k: int, slot_map: dict[int, int], new_k: int):
    """Corner map for a face correspondence given by a local-slot dictionary."""
    new_corners = FACE_CORNERS[new_k]
    return tuple(new_corners.index(slot_map[s]) for s in FACE_CORNERS[old_k])


def _invert_corner_map(m):
    inv = [0, 0, 0]
    for i, j in enumerate(m):
        inv[j] = i
    return tuple(inv)


def _compose_corner_maps(second, first):
    """Corner map applying `first` then `second`."""
    return tuple(second[first[i]] for i in range(3))


class Pseudotriangulation:
    """Closed oriented 3-manifold pseudotriangulation with derived cells.

    Construct through :func:`derive_cells`; instances are immutable values and
    safe to share between threads.
    """

    def __init__(self, vertex_count, tetrahedra, adjacency, vertex_labels):
        self.vertex_count = vertex_count
        self.tetrahedra = tetrahedra
        self._adj = adjacency  # [tet][face] -> (tet2, face2, corner_map)
        self.vertex_labels = vertex_labels
        self.edges: tuple[Edge, ...] = ()
        self.faces: tuple[Face, ...] = ()
        self.edge_of: dict[tuple[int, int], int] = {}
        self.face_of: dict[tuple[int, int], int] = {}
        self._stars: list = []
        self._signature = None

    # basic accessors --------------------------------------------------------

    @property
    def num_tets(self) -> int:
        return len(self.tetrahedra)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    def gluing(self, tet: int, face: int):
        return self._adj[tet][face]

    @property
    def gluings(self) -> tuple[FaceGluing, ...]:
        out = []
        for t, row in enumerate(self._adj):
            for k, (t2, k2, m) in enumerate(row):
                out.append(FaceGluing((t, k), (t2, k2), m))
        return tuple(out)

    def counts(self) -> tuple[int, int, int, int]:
        return (self.vertex_count, self.num_edges, self.num_faces,
                self.num_tets)

    def face_sides(self, f: int):
        return self.faces[f].sides

    def face_corner_ids(self, f: int) -> tuple[int, int, int]:
        """Corners (A, B, C) of side 0, ordered so (A,B,C,apex) is an even
        arrangement of that tetrahedron's stored order."""
        (t, k), _ = self.faces[f].sides
        sA, sB, sC = _even_face_order(k)
        v = self.tetrahedra[t].vertices
        return (v[sA], v[sB], v[sC])

    def face_apex_ids(self, f: int) -> tuple[int, int]:
        """(D, E): apexes over the face on side 0 and side 1."""
        (t1, k1), (t2, k2) = self.faces[f].sides
        return (self.tetrahedra[t1].vertices[k1],
                self.tetrahedra[t2].vertices[k2])

    def edge_star(self, e: int) -> tuple[StarEntry, ...]:
        return self._stars[e]

    def vertex_corners(self, v: int):
        out = []
        for t, tet in enumerate(self.tetrahedra):
            for s in range(4):
                if tet.vertices[s] == v:
                    out.append((t, s))
        return out


def _even_face_order(k: int) -> tuple[int, int, int]:
    """Corner slots of face k ordered so (c0, c1, c2, k) is an even
    permutation of (0, 1, 2, 3)."""
    c0, c1, c2 = FACE_CORNERS[k]
    if perm_parity((c0, c1, c2, k)) < 0:
        c0, c1 = c1, c0
    return (c0, c1, c2)


def _normalize_gluings(n_tets, gluings):
    """Fill the full (tet, face) adjacency table from a gluing list.

    Accepts the involution stored one way or both ways and raises if any
    face is glued twice, left unglued, or glued inconsistently.
    """
    table = [[None] * 4 for _ in range(n_tets)]
    for g in gluings:
        if isinstance(g, FaceGluing):
            src, dst, m = g.source, g.target, g.corner_map
        else:
            src, dst, m = g
        t, k = src
        t2, k2 = dst
        m = tuple(m)
        if sorted(m) != [0, 1, 2]:
            raise TriangulationError(f"bad corner map {m} for {src}->{dst}")
        if not (0 <= t < n_tets and 0 <= t2 < n_tets and 0 <= k < 4
                and 0 <= k2 < 4):
            raise TriangulationError(f"gluing {src}->{dst} out of range")
        if (t, k) == (t2, k2):
            raise TriangulationError(f"face {src} glued to itself")
        for side, entry in (((t, k), (t2, k2, m)),
                            ((t2, k2), (t, k, _invert_corner_map(m)))):
            existing = table[side[0]][side[1]]
            if existing is None:
                table[side[0]][side[1]] = entry
            elif existing != entry:
                raise TriangulationError(
                    f"face {side} glued twice (non-involutive gluing set)")
    for t in range(n_tets):
        for k in range(4):
            if table[t][k] is None:
                raise TriangulationError(
                    f"not closed: face ({t}, {k}) is unglued")
    return table


def _derive_faces(pt: Pseudotriangulation):
    faces = []
    face_of = {}
    for t in range(pt.num_tets):
        for k in range(4):
            if (t, k) in face_of:
                continue
            t2, k2, _ = pt._adj[t][k]
            fid = len(faces)
            faces.append(Face(((t, k), (t2, k2))))
            face_of[(t, k)] = fid
            face_of[(t2, k2)] = fid
    pt.faces = tuple(faces)
    pt.face_of = face_of


def _derive_edges(pt: Pseudotriangulation):
    n = pt.num_tets
    parent = list(range(6 * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for t in range(n):
        for k in range(4):
            t2, k2, m = pt._adj[t][k]
            sigma = _full_perm(k, k2, m)
            for a, b in itertools.combinations(FACE_CORNERS[k], 2):
                e1 = 6 * t + EDGE_INDEX[frozenset((a, b))]
                e2 = 6 * t2 + EDGE_INDEX[frozenset((sigma[a], sigma[b]))]
                union(e1, e2)

    classes: dict[int, list[tuple[int, int]]] = {}
    for slot in range(6 * n):
        classes.setdefault(find(slot), []).append(divmod(slot, 6))
    edges = []
    edge_of = {}
    for root in sorted(classes):
        incidences = tuple(sorted(classes[root]))
        t, ei = incidences[0]
        a, b = EDGE_SLOTS[ei]
        v = pt.tetrahedra[t].vertices
        eid = len(edges)
        edges.append(Edge((v[a], v[b]), incidences))
        for inc in incidences:
            edge_of[inc] = eid
    pt.edges = tuple(edges)
    pt.edge_of = edge_of


def _walk_star(pt: Pseudotriangulation, e: int) -> tuple[StarEntry, ...]:
    """Cyclic star of edge e in its canonical orientation.

    Raises if the walk does not close into a single cycle covering every
    incidence of the edge class.
    """
    edge = pt.edges[e]
    t0, ei0 = edge.incidences[0]
    b0, c0 = EDGE_SLOTS[ei0]  # canonical orientation: tail at smaller slot
    p0, q0 = (s for s in range(4) if s not in (b0, c0))
    if perm_parity((p0, q0, b0, c0)) < 0:
        p0, q0 = q0, p0
    entries = []
    state = (t0, p0, q0, b0, c0)
    for _ in range(len(edge.incidences)):
        t, p, q, b, c = state
        entries.append(StarEntry(t, (p, q), (b, c)))
        t2, k2, m = pt._adj[t][p]  # cross the face opposite the first apex
        sigma = _full_perm(p, k2, m)
        state = (t2, sigma[q], sigma[p], sigma[b], sigma[c])
    if state != (t0, p0, q0, b0, c0):
        raise TriangulationError(
            f"edge {e}: star does not close into a single coherent cycle")
    return tuple(entries)


def _derive_stars(pt: Pseudotriangulation):
    pt._stars = [None] * pt.num_edges
    for e in range(pt.num_edges):
        pt._stars[e] = _walk_star(pt, e)


def derive_cells(tetrahedra, gluings, vertex_labels=None, strict=True
                 ) -> Pseudotriangulation:
    """Build a pseudotriangulation from tetrahedra and face gluings.

    Edges and faces come out as equivalence classes of local incidences;
    edge stars are walked and checked to close.  With strict=True (default)
    the full validation runs and any violation raises TriangulationError.
    """
    tets = tuple(
        t if isinstance(t, Tetrahedron) else Tetrahedron(tuple(t))
        for t in tetrahedra)
    if not tets:
        raise TriangulationError("empty complex")
    used = sorted({v for t in tets for v in t.vertices})
    if used != list(range(len(used))):
        raise TriangulationError("vertex ids must be dense 0-based")
    n0 = len(used)
    if vertex_labels is None:
        vertex_labels = tuple(str(v) for v in range(n0))
    else:
        vertex_labels = tuple(vertex_labels)
        if len(vertex_labels) != n0:
            raise TriangulationError("vertex label count mismatch")
    adjacency = _normalize_gluings(len(tets), gluings)
    pt = Pseudotriangulation(n0, tets, adjacency, vertex_labels)
    _derive_faces(pt)
    _derive_edges(pt)
    try:
        _derive_stars(pt)
        star_error = None
    except TriangulationError as exc:
        if strict:
            raise
        star_error = str(exc)
        pt._stars = [None] * pt.num_edges
    if strict:
        report = validate(pt)
        if not report.ok:
            raise TriangulationError("; ".join(report.violations))
    elif star_error is not None:
        pt._star_error = star_error
    return pt


# validation -----------------------------------------------------------------

def _link_check(pt: Pseudotriangulation, v: int):
    """Violations for the link of vertex v (must be a connected 2-sphere)."""
    corners = pt.vertex_corners(v)
    if not corners:
        return [f"vertex {v}: not contained in any tetrahedron"]
    cid = {c: i for i, c in enumerate(corners)}

    parent = list(range(len(corners)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # germs (t, s_v, s_other) are link vertices; union-find across gluings
    germs = [(t, sv, s) for (t, sv) in corners for s in range(4) if s != sv]
    gid = {g: i for i, g in enumerate(germs)}
    gparent = list(range(len(germs)))

    def gfind(x):
        while gparent[x] != x:
            gparent[x] = gparent[gparent[x]]
            x = gparent[x]
        return x

    for (t, sv) in corners:
        for k in range(4):
            if k == sv:
                continue  # only faces containing v glue link cells
            t2, k2, m = pt._adj[t][k]
            sigma = _full_perm(k, k2, m)
            a, b = find(cid[(t, sv)]), find(cid[(t2, sigma[sv])])
            if a != b:
                parent[max(a, b)] = min(a, b)
            for s in FACE_CORNERS[k]:
                if s == sv:
                    continue
                ga = gfind(gid[(t, sv, s)])
                gb = gfind(gid[(t2, sigma[sv], sigma[s])])
                if ga != gb:
                    gparent[max(ga, gb)] = min(ga, gb)

    out = []
    if len({find(i) for i in range(len(corners))}) != 1:
        out.append(f"vertex {v}: link is disconnected")
    link_v = len({gfind(i) for i in range(len(germs))})
    link_e2 = 3 * len(corners)  # twice the number of link edges
    chi2 = 2 * link_v - link_e2 + 2 * len(corners)
    if chi2 != 4:
        out.append(f"vertex {v}: link Euler characteristic {chi2 / 2}, "
                   "not a sphere")
    return out


def validate(pt: Pseudotriangulation) -> ValidationReport:
    """Check every structural invariant; an empty report means valid."""
    bad = []
    for t, tet in enumerate(pt.tetrahedra):
        if len(set(tet.vertices)) != 4:
            bad.append(f"tetrahedron {t}: repeated vertex {tet.vertices}")
        if any(not 0 <= v < pt.vertex_count for v in tet.vertices):
            bad.append(f"tetrahedron {t}: vertex id out of range")

    for t in range(pt.num_tets):
        for k in range(4):
            t2, k2, m = pt._adj[t][k]
            back = pt._adj[t2][k2]
            if back != (t, k, _invert_corner_map(m)):
                bad.append(f"gluing ({t},{k}): not involutive")
            src_v = pt.tetrahedra[t].vertices
            dst_v = pt.tetrahedra[t2].vertices
            for i, s in enumerate(FACE_CORNERS[k]):
                if src_v[s] != dst_v[FACE_CORNERS[k2][m[i]]]:
                    bad.append(f"gluing ({t},{k}): corner vertex ids differ")
                    break
            sign = ((-1) ** k) * perm_parity(m) * ((-1) ** k2)
            if sign != -1:
                bad.append(f"gluing ({t},{k})->({t2},{k2}): orientation "
                           "not reversed on the face")

    if pt.num_faces != 2 * pt.num_tets:
        bad.append(f"face count {pt.num_faces} != 2 * {pt.num_tets}")
    n0, n1, n2, n3 = pt.counts()
    if n0 - n1 + n2 - n3 != 0:
        bad.append(f"Euler characteristic {n0 - n1 + n2 - n3} != 0")

    # connectivity of the tetrahedron adjacency graph
    seen = {0}
    queue = [0]
    while queue:
        t = queue.pop()
        for k in range(4):
            t2 = pt._adj[t][k][0]
            if t2 not in seen:
                seen.add(t2)
                queue.append(t2)
    if len(seen) != pt.num_tets:
        bad.append("complex is disconnected")

    star_error = getattr(pt, "_star_error", None)
    if star_error is not None:
        bad.append(star_error)
    else:
        for e in range(pt.num_edges):
            star = pt._stars[e]
            if star is None:
                try:
                    star = _walk_star(pt, e)
                except TriangulationError as exc:
                    bad.append(str(exc))
                    continue
            if len(star) != len(pt.edges[e].incidences):
                bad.append(f"edge {e}: star cycle misses incidences")

    if not bad:  # link checks assume a coherent gluing table
        for v in range(pt.vertex_count):
            bad.extend(_link_check(pt, v))
    return ValidationReport(tuple(bad))


def edge_star(pt: Pseudotriangulation, e: int) -> tuple[StarEntry, ...]:
    """Cyclic star of edge e; see StarEntry for the slot conventions."""
    return pt.edge_star(e)


# canonical form / isomorphism -------------------------------------------------

def _bfs_signature(pt: Pseudotriangulation, start: int, rho0):
    """Signature of the relabelled complex grown from (start, rho0) by BFS."""
    n = pt.num_tets
    rho = [None] * n  # old local slot -> new local slot, per tet
    order = [None] * n  # old tet -> new tet index
    rho[start] = rho0
    order[start] = 0
    discovered = [start]
    vmap = {}
    tet_rows = []
    glue_rows = []
    for new_t in range(n):
        t = discovered[new_t]
        inv = [0, 0, 0, 0]
        for s in range(4):
            inv[rho[t][s]] = s
        row = []
        for j in range(4):
            v = pt.tetrahedra[t].vertices[inv[j]]
            if v not in vmap:
                vmap[v] = len(vmap)
            row.append(vmap[v])
        tet_rows.append(tuple(row))
        for j in range(4):
            k = inv[j]
            t2, k2, m = pt._adj[t][k]
            if order[t2] is None:
                sigma = _full_perm(k, k2, m)
                inv_sigma = [0, 0, 0, 0]
                for s in range(4):
                    inv_sigma[sigma[s]] = s
                rho[t2] = tuple(rho[t][inv_sigma[s]] for s in range(4))
                order[t2] = len(discovered)
                discovered.append(t2)
        for j in range(4):
            k = inv[j]
            t2, k2, m = pt._adj[t][k]
            sigma = _full_perm(k, k2, m)
            new_sigma = tuple(rho[t2][sigma[inv[s]]] for s in range(4))
            glue_rows.append((order[t2], new_sigma))
    return (tuple(tet_rows), tuple(glue_rows))


def canonical_signature(pt: Pseudotriangulation):
    """Lexicographically least BFS relabelling over tetrahedron adjacency.

    Complete combinatorial invariant: two complexes are isomorphic (vertex
    and tetrahedron relabelling with gluings preserved) iff signatures match.
    """
    if pt._signature is not None:
        return pt._signature
    best = None
    for start in range(pt.num_tets):
        for rho0 in itertools.permutations(range(4)):
            sig = _bfs_signature(pt, start, rho0)
            if best is None or sig < best:
                best = sig
    pt._signature = (pt.vertex_count,) + best
    return pt._signature


def is_isomorphic(a: Pseudotriangulation, b: Pseudotriangulation) -> bool:
    return canonical_signature(a) == canonical_signature(b)


# cluster surgery ---------------------------------------------------------------

def _replace_cluster(pt, doomed, new_tets, internal, boundary,
                     new_labels=None):
    """Replace the tetrahedra in `doomed` with `new_tets`.

    internal: gluings among new tets as ((i, k, corner_map), (j, k2)).
    boundary: (old_tet, old_face) -> (new_index, new_face, slot_map) for every
    cluster-boundary face, slot_map mapping old local slots to new ones.
    Old gluings that land on the cluster are rerouted through this
    correspondence, which handles clusters glued to themselves.
    """
    doomed_set = set(doomed)
    survivors = [t for t in range(pt.num_tets) if t not in doomed_set]
    tet_map = {t: i for i, t in enumerate(survivors)}
    base = len(survivors)

    all_vertices = [pt.tetrahedra[t].vertices for t in survivors]
    all_vertices += [tuple(v) for v in new_tets]

    # dense vertex renumbering (drops vertices only used by doomed tets)
    used = sorted({v for tup in all_vertices for v in tup})
    vmap = {v: i for i, v in enumerate(used)}
    labels = []
    for v in used:
        if v < pt.vertex_count:
            labels.append(pt.vertex_labels[v])
        else:
            extra = None if new_labels is None else new_labels.get(v)
            labels.append(extra if extra is not None else f"v{v}")

    tets = [tuple(vmap[v] for v in tup) for tup in all_vertices]

    inv_boundary = {}
    for (ot, ok), (i, nk, slot_map) in boundary.items():
        inv_boundary[(base + i, nk)] = (ot, ok, slot_map)

    def resolve(ot, ok):
        """New-side address and corner map for old face (ot, ok)."""
        t2, k2, m = pt._adj[ot][ok]
        if t2 not in doomed_set:
            return (tet_map[t2], k2, m)
        i2, nk2, slot_map2 = boundary[(t2, k2)]
        phi2 = _corner_perm(k2, slot_map2, nk2)
        return (base + i2, nk2, _compose_corner_maps(phi2, m))

    gluings = []
    for t in survivors:
        for k in range(4):
            nt2, nk2, nm = resolve(t, k)
            gluings.append(((tet_map[t], k), (nt2, nk2), nm))
    for (i, k, m), (j, k2) in internal:
        gluings.append(((base + i, k), (base + j, k2), tuple(m)))
    for (nt, nk), (ot, ok, slot_map) in inv_boundary.items():
        phi = _corner_perm(ok, slot_map, nk)
        t2n, k2n, m2 = resolve(ot, ok)
        gluings.append(((nt, nk), (t2n, k2n),
                        _compose_corner_maps(m2, _invert_corner_map(phi))))

    new_pt = derive_cells(tets, gluings, vertex_labels=labels, strict=True)
    return new_pt, vmap, tet_map


# Pachner and auxiliary moves ---------------------------------------------------


def _two_three_data(pt, f: int):
    """Slot bookkeeping for a 2->3 move at face f; raises if inapplicable."""
    (t1, k1), (t2, k2) = pt.faces[f].sides
    if t1 == t2:
        raise TriangulationError(
            f"2-3 move at face {f}: face lies on a self-gluing")
    sA, sB, sC = _even_face_order(k1)
    sigma = _full_perm(k1, k2, pt._adj[t1][k1][2])
    v1, v2 = pt.tetrahedra[t1].vertices, pt.tetrahedra[t2].vertices
    A, B, C, D = v1[sA], v1[sB], v1[sC], v1[k1]
    E = v2[k2]
    if D == E:
        raise TriangulationError(
            f"2-3 move at face {f}: opposite apexes coincide (vertex {D}), "
            "the move would create tetrahedra with repeated vertices")
    return t1, t2, k1, k2, (sA, sB, sC), sigma, (A, B, C, D, E)


def pachner_2_3(pt: Pseudotriangulation, f: int) -> Pseudotriangulation:
    """Replace the two tetrahedra ABCD, EABC adjacent at face f with the
    three tetrahedra ABED, BCED, CAED around the new edge DE."""
    return _do_2_3(pt, f)[0]


def _do_2_3(pt: Pseudotriangulation, f: int):
    t1, t2, k1, k2, (sA, sB, sC), sigma, ids = _two_three_data(pt, f)
    A, B, C, D, E = ids
    sA2, sB2, sC2 = sigma[sA], sigma[sB], sigma[sC]

    new_tets = [(A, B, E, D), (B, C, E, D), (C, A, E, D)]
    internal = [
        ((0, 0, (0, 1, 2)), (1, 1)),  # BED
        ((0, 1, (0, 1, 2)), (2, 0)),  # AED
        ((1, 0, (0, 1, 2)), (2, 1)),  # CED
    ]
    boundary = {
        (t1, sA): (1, 2, {sB: 0, sC: 1, k1: 3}),   # BCD
        (t1, sB): (2, 2, {sC: 0, sA: 1, k1: 3}),   # CAD
        (t1, sC): (0, 2, {sA: 0, sB: 1, k1: 3}),   # ABD
        (t2, sA2): (1, 3, {sB2: 0, sC2: 1, k2: 2}),  # BCE
        (t2, sB2): (2, 3, {sC2: 0, sA2: 1, k2: 2}),  # CAE
        (t2, sC2): (0, 3, {sA2: 0, sB2: 1, k2: 2}),  # ABE
    }
    new_pt, vmap, tet_map = _replace_cluster(pt, [t1, t2], new_tets,
                                             internal, boundary)
    base = pt.num_tets - 2
    info = {
        "ids": tuple(vmap[x] for x in ids),
        "new_tets": (base, base + 1, base + 2),
        "vmap": vmap,
        "tet_map": tet_map,
    }
    return new_pt, info


def pachner_3_2(pt: Pseudotriangulation, e: int) -> Pseudotriangulation:
    """Inverse of the 2->3 move: collapse an edge of star length 3."""
    star = pt.edge_star(e)
    if len(star) != 3:
        raise TriangulationError(
            f"3-2 move at edge {e}: star has length {len(star)}, need 3")
    tets = [s.tet for s in star]
    if len(set(tets)) != 3:
        raise TriangulationError(
            f"3-2 move at edge {e}: star revisits a tetrahedron")

    verts = [pt.tetrahedra[s.tet].vertices for s in star]
    X = verts[0][star[0].apex_slots[0]]
    Y = verts[1][star[1].apex_slots[0]]
    Z = verts[2][star[2].apex_slots[0]]
    P = verts[0][star[0].edge_slots[0]]
    Q = verts[0][star[0].edge_slots[1]]

    # star entry i reads (x_i, x_{i+1}, P, Q); outputs (X,Y,Z,Q) and (P,X,Y,Z)
    new_tets = [(X, Y, Z, Q), (P, X, Y, Z)]
    internal = [((0, 3, (0, 1, 2)), (1, 0))]
    boundary = {}
    for i, s in enumerate(star):
        p, q = s.apex_slots
        b, c = s.edge_slots
        # local apex pair of entry i is (x_i, x_{i+1})
        i0, i1 = i, (i + 1) % 3
        missing = ({0, 1, 2} - {i0, i1}).pop()
        # face opposite tail P: corners (x_i, x_{i+1}, Q) -> new tet 0
        boundary[(s.tet, b)] = (0, missing, {p: i0, q: i1, c: 3})
        # face opposite head Q: corners (x_i, x_{i+1}, P) -> new tet 1
        boundary[(s.tet, c)] = (1, missing + 1, {p: i0 + 1, q: i1 + 1, b: 0})
    new_pt, vmap, tet_map = _replace_cluster(pt, tets, new_tets, internal,
                                             boundary)
    return new_pt


def pachner_0_2(pt: Pseudotriangulation, f: int, label: str | None = None
                ) -> Pseudotriangulation:
    """Inflate face f into a mirror pair of tetrahedra around a new vertex."""
    return _do_0_2(pt, pt.faces[f].sides[0], label)[0]


def _do_0_2(pt: Pseudotriangulation, side: tuple[int, int],
            label: str | None = None):
    t1, k1 = side
    t2, k2, m = pt._adj[t1][k1]
    sA, sB, sC = _even_face_order(k1)
    sigma = _full_perm(k1, k2, m)
    v1 = pt.tetrahedra[t1].vertices
    A, B, C = v1[sA], v1[sB], v1[sC]
    E = pt.vertex_count

    tets = [t.vertices for t in pt.tetrahedra]
    ta = len(tets)      # (A, B, C, E)
    tb = ta + 1         # (E, A, B, C)
    tets = tets + [(A, B, C, E), (E, A, B, C)]

    gluings = []
    for t in range(pt.num_tets):
        for k in range(4):
            if (t, k) in ((t1, k1), (t2, k2)):
                continue
            gluings.append(((t, k), pt._adj[t][k][:2], pt._adj[t][k][2]))
    # the two copies of face ABC
    gluings.append(((t1, k1), (tb, 0),
                    _corner_perm(k1, {sA: 1, sB: 2, sC: 3}, 0)))
    gluings.append(((t2, k2), (ta, 3),
                    _corner_perm(k2, {sigma[sA]: 0, sigma[sB]: 1,
                                      sigma[sC]: 2}, 3)))
    # mirror gluings between the two new tetrahedra
    gluings.append(((ta, 0, ), (tb, 1), (1, 2, 0)))  # BCE
    gluings.append(((ta, 1, ), (tb, 2), (1, 2, 0)))  # ACE
    gluings.append(((ta, 2, ), (tb, 3), (1, 2, 0)))  # ABE

    labels = list(pt.vertex_labels) + [label if label else f"v{E}"]
    new_pt = derive_cells(tets, gluings, vertex_labels=labels, strict=True)

    info = {
        "corners": (A, B, C),
        "new_vertex": E,
        "new_tets": (ta, tb),
        "face_abc": new_pt.face_of[(t2, k2)],        # kept angle-sum partner
        "face_abc_prime": new_pt.face_of[(t1, k1)],  # copy toward side t1
        "faces_mirror": (new_pt.face_of[(ta, 2)],    # ABE
                         new_pt.face_of[(ta, 0)],    # BCE
                         new_pt.face_of[(ta, 1)]),   # CAE
        "edges_new": (new_pt.edge_of[(ta, EDGE_INDEX[frozenset((0, 3))])],  # AE
                      new_pt.edge_of[(ta, EDGE_INDEX[frozenset((1, 3))])],  # BE
                      new_pt.edge_of[(ta, EDGE_INDEX[frozenset((2, 3))])]),  # CE
        "apexes": (pt.tetrahedra[t1].vertices[k1],
                   pt.tetrahedra[t2].vertices[k2]),
        "side": (t1, k1),
    }
    return new_pt, info


def pachner_1_4(pt: Pseudotriangulation, t: int, label: str | None = None
                ) -> Pseudotriangulation:
    """Star-subdivide tetrahedron t, as a 0->2 inflation of its face followed
    by a 2->3 move against the remaining half."""
    return _do_1_4(pt, t, label)[0]


def _do_1_4(pt: Pseudotriangulation, t: int, label: str | None = None):
    if not 0 <= t < pt.num_tets:
        raise TriangulationError(f"no tetrahedron {t}")
    mid, info02 = _do_0_2(pt, (t, 3), label)
    f_prime = info02["face_abc_prime"]
    out, info23 = _do_2_3(mid, f_prime)
    return out, {"zero_two": info02, "two_three": info23}


def pachner_4_1(pt: Pseudotriangulation, v: int) -> Pseudotriangulation:
    """Inverse of 1->4: remove a vertex whose star is a 4-tetrahedron cone."""
    corners = pt.vertex_corners(v)
    if len(corners) != 4:
        raise TriangulationError(
            f"4-1 move at vertex {v}: {len(corners)} incidences, need 4")
    tets = [t for t, _ in corners]
    if len(set(tets)) != 4:
        raise TriangulationError(
            f"4-1 move at vertex {v}: star revisits a tetrahedron")
    slot_v = dict(corners)

    # link vertex classes: germs (tet, slot != slot_v) under star gluings
    germs = [(t, s) for t, sv in corners for s in range(4) if s != sv]
    gidx = {g: i for i, g in enumerate(germs)}
    parent = list(range(len(germs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pair_faces = {}
    for t, sv in corners:
        for k in range(4):
            if k == sv:
                continue
            t2, k2, m = pt._adj[t][k]
            if t2 not in slot_v:
                raise TriangulationError(
                    f"4-1 move at vertex {v}: star is not closed over faces")
            sigma = _full_perm(k, k2, m)
            if sigma[sv] != slot_v[t2]:
                raise TriangulationError(
                    f"4-1 move at vertex {v}: cone structure broken")
            key = frozenset(((t, k), (t2, k2)))
            pair_faces.setdefault(frozenset((t, t2)), set()).add(key)
            for s in FACE_CORNERS[k]:
                if s == sv:
                    continue
                a, b = find(gidx[(t, s)]), find(gidx[(t2, sigma[s])])
                if a != b:
                    parent[max(a, b)] = min(a, b)
    for pair, fs in pair_faces.items():
        if len(fs) != 1:
            raise TriangulationError(
                f"4-1 move at vertex {v}: tetrahedra {sorted(pair)} share "
                f"{len(fs)} faces at the vertex, need exactly 1")
    if len(pair_faces) != 6:
        raise TriangulationError(
            f"4-1 move at vertex {v}: star is not a cone over a tetrahedron")

    classes = {}
    for g in germs:
        classes.setdefault(find(gidx[g]), []).append(g)
    if len(classes) != 4:
        raise TriangulationError(
            f"4-1 move at vertex {v}: link has {len(classes)} vertices, "
            "need 4")
    class_of = {}
    class_ids = []
    for root in sorted(classes):
        cls = len(class_ids)
        t0, s0 = classes[root][0]
        class_ids.append(pt.tetrahedra[t0].vertices[s0])
        for g in classes[root]:
            class_of[g] = cls
            if pt.tetrahedra[g[0]].vertices[g[1]] != class_ids[cls]:
                raise TriangulationError(
                    f"4-1 move at vertex {v}: inconsistent link vertex ids")
    if len(set(class_ids)) != 4:
        raise TriangulationError(
            f"4-1 move at vertex {v}: result would repeat vertex ids")

    # even relabelling (E, P, Q, R) of the first star tetrahedron fixes the
    # output orientation: new tetrahedron reads (W, P, Q, R)
    t0 = corners[0][0]
    sv0 = slot_v[t0]
    rest = [s for s in range(4) if s != sv0]
    if perm_parity((sv0, rest[0], rest[1], rest[2])) < 0:
        rest[0], rest[1] = rest[1], rest[0]
    pqr_classes = [class_of[(t0, s)] for s in rest]
    w_class = ({0, 1, 2, 3} - set(pqr_classes)).pop()
    new_order = [w_class] + pqr_classes  # class -> slot in the new tet
    slot_of_class = {c: i for i, c in enumerate(new_order)}
    new_tet = tuple(class_ids[c] for c in new_order)

    boundary = {}
    for t, sv in corners:
        slot_map = {}
        present = set()
        for s in range(4):
            if s == sv:
                continue
            c = class_of[(t, s)]
            slot_map[s] = slot_of_class[c]
            present.add(slot_of_class[c])
        missing = ({0, 1, 2, 3} - present).pop()
        boundary[(t, sv)] = (0, missing, slot_map)

    new_pt, _, _ = _replace_cluster(pt, tets, [new_tet], [], boundary)
    return new_pt
