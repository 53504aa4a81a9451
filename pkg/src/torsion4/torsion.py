"""Torsion of the geometric complex and the associated manifold invariant.

The torsion is an alternating ratio of maximal minors

    tau = det m2 * det m4 / (det m1 * det m3 * det m5)

over a chain of row/column index sets in which the row set of each map and
the column set of the next partition the basis of the space between them.
Its absolute value does not depend on the chain, and

    |I| = |tau| * prod(edge lengths^3) / prod(2 * face areas)

is unchanged by the local moves (checked in :mod:`torsion4.verify`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complexes import GeometricComplex, build_complex, check_acyclicity
from .geometry import Embedding, edge_length, face_area
from .triangulation import Pseudotriangulation

__all__ = [
    "TorsionError",
    "TauChain",
    "TorsionResult",
    "InvariantResult",
    "select_tau_chain",
    "torsion",
    "invariant",
    "length_scaling_exponent",
]

MINOR_EPS = 1e-12
TAU_RETRIES = 50


class TorsionError(RuntimeError):
    """Raised when no usable tau-chain exists (non-acyclic or ill
    conditioned input)."""


@dataclass(frozen=True)
class TauChain:
    """Row and column index sets, one pair per map, partitioning each
    intermediate basis."""

    rows: tuple[tuple[int, ...], ...]
    cols: tuple[tuple[int, ...], ...]

    def minor(self, gc: GeometricComplex, i: int) -> np.ndarray:
        return gc.maps[i].matrix[np.ix_(self.rows[i], self.cols[i])]


@dataclass(frozen=True)
class TorsionResult:
    tau: float
    log_abs_tau: float
    chain: TauChain
    min_equilibrated_det: float

    @property
    def abs_tau(self) -> float:
        return abs(self.tau)


@dataclass(frozen=True)
class InvariantResult:
    abs_invariant: float
    log_abs_invariant: float
    torsion: TorsionResult
    acyclicity: object
    complex_report: object


def _select_rows(matrix: np.ndarray, count: int, rng=None):
    """Greedy pivoted row selection of `count` independent rows, by modified
    Gram-Schmidt on the residuals.  Randomized score scaling varies the
    choice without affecting validity."""
    r = matrix.astype(float).copy()
    m = r.shape[0]
    scale = np.ones(m)
    if rng is not None:
        scale = np.exp(rng.uniform(-1.0, 1.0, size=m))
    alive = np.ones(m, dtype=bool)
    chosen: list[int] = []
    floor = 1e-12 * max(1.0, float(np.max(np.abs(r), initial=0.0)))
    for _ in range(count):
        scores = np.where(alive, np.linalg.norm(r, axis=1) * scale, -1.0)
        best = int(np.argmax(scores))
        if scores[best] <= floor:
            raise TorsionError("rank deficiency during row selection")
        q = r[best] / np.linalg.norm(r[best])
        r -= np.outer(r @ q, q)
        alive[best] = False
        chosen.append(best)
    return tuple(chosen)


def _equilibrated_logdet(m: np.ndarray):
    """(sign, log|det|, equilibrated |det|) via row/column max scaling."""
    if m.size == 0:
        return 1.0, 0.0, 1.0
    r = np.max(np.abs(m), axis=1)
    c = np.max(np.abs(m / np.where(r[:, None] == 0, 1, r[:, None])), axis=0)
    if np.any(r == 0) or np.any(c == 0):
        return 0.0, -np.inf, 0.0
    scaled = m / r[:, None] / c[None, :]
    sign_s, logdet_s = np.linalg.slogdet(scaled)
    logdet = logdet_s + np.sum(np.log(r)) + np.sum(np.log(c))
    return float(sign_s), float(logdet), float(sign_s and math.exp(logdet_s))


def select_tau_chain(gc: GeometricComplex, seed: int = 0,
                     retries: int = TAU_RETRIES) -> TauChain:
    """Left-to-right greedy chain: each map takes the columns left over by
    the previous row choice, and rows picked by pivoted elimination.  On a
    singular forced minor the selection is re-randomized, up to `retries`.
    """
    dims = gc.dims()
    report = check_acyclicity(gc)
    if not report.acyclic:
        raise TorsionError(
            f"no tau-chain: complex not acyclic (ranks {report.ranks})")
    rng = np.random.default_rng(seed)
    last = None
    for attempt in range(retries):
        r = rng if (attempt or seed) else None  # seed 0: best-quality greedy
        try:
            rows, cols = [], []
            free = tuple(range(dims[0]))
            for i, lm in enumerate(gc.maps):
                cols.append(free)
                sub = lm.matrix[:, free]
                picked = _select_rows(sub, len(free), rng=r)
                rows.append(picked)
                free = tuple(j for j in range(dims[i + 1])
                             if j not in set(picked))
            if free:
                raise TorsionError("chain does not exhaust the last space")
            chain = TauChain(tuple(rows), tuple(cols))
            _, _, mineq = _chain_dets(gc, chain)
            if mineq <= MINOR_EPS:
                raise TorsionError(
                    f"minor below conditioning floor ({mineq:.2e})")
            return chain
        except TorsionError as exc:
            last = exc
    raise TorsionError(f"no usable tau-chain after {retries} attempts: {last}")


def _chain_dets(gc: GeometricComplex, chain: TauChain):
    signs, logs, mineq = 1.0, [], np.inf
    for i in range(5):
        s, ld, eq = _equilibrated_logdet(chain.minor(gc, i))
        if s == 0.0:
            return 0.0, [-np.inf] * 5, 0.0
        signs *= s
        logs.append(ld)
        mineq = min(mineq, abs(eq))
    return signs, logs, mineq


def torsion(gc: GeometricComplex, chain: TauChain) -> TorsionResult:
    """Alternating minor ratio over the chain; sign is reported but only the
    absolute value is an invariant."""
    for i, (r, c) in enumerate(zip(chain.rows, chain.cols)):
        if len(r) != len(c):
            raise TorsionError(f"chain minor {i + 1} is not square")
    sign, logs, mineq = _chain_dets(gc, chain)
    if mineq <= MINOR_EPS:
        raise TorsionError(f"chain minor below {MINOR_EPS:.0e}")
    log_tau = logs[1] + logs[3] - logs[0] - logs[2] - logs[4]
    return TorsionResult(sign * math.exp(log_tau), log_tau, chain, mineq)


def log_metric_factor(pt: Pseudotriangulation, emb: Embedding) -> float:
    """log of prod(edge length^3) / prod(2 * face area)."""
    coords = [tuple(p) for p in emb.points]
    out = 0.0
    for edge in pt.edges:
        out += 3.0 * math.log(edge_length(coords[edge.endpoints[0]],
                                          coords[edge.endpoints[1]]))
    for f in range(pt.num_faces):
        a, b, c = pt.face_corner_ids(f)
        out -= math.log(2.0 * face_area(coords[a], coords[b], coords[c]))
    return out


def invariant(pt: Pseudotriangulation, emb: Embedding, seed: int = 0,
              gc: GeometricComplex | None = None) -> InvariantResult:
    """|tau| * prod(l^3) / prod(2S) for an embedded pseudotriangulation."""
    from .complexes import check_complex

    if gc is None:
        gc = build_complex(pt, emb, seed=seed)
    comp = check_complex(gc)
    acy = check_acyclicity(gc)
    chain = select_tau_chain(gc, seed=seed)
    tor = torsion(gc, chain)
    log_i = tor.log_abs_tau + log_metric_factor(pt, emb)
    return InvariantResult(math.exp(log_i), log_i, tor, acy, comp)


def length_scaling_exponent(pt: Pseudotriangulation) -> int:
    """Exponent k with |tau(s x)| = s^k |tau(x)| under coordinate scaling.

    Counting length dimensions of the five minors: m1 rows are coordinate
    differentials (+10) against 4 translation columns (-4); m2 carries its
    length rows (+k2) against coordinate columns (-(4 N0 - 10)); m3 is
    dimensionless rows against the leftover length columns (-(N1 - k2));
    m4 is dimensionless; m5 has the four moment rows (+4).  The alternating
    sum collapses to N1 - 4 N0 independently of the chain.
    """
    return pt.num_edges - 4 * pt.vertex_count
