"""Orbit expansion of the reflection group around the base cell.

Cells of the tiling correspond to words in the five generating reflections
T_0..T_4; the neighbour of the cell g(C) across its i-th face is (g T_i)(C),
so a breadth-first scan over words (generators in index order, FIFO queue)
enumerates cells by face-adjacency depth.  Images are deduplicated by a
quantized canonical key of their vertex sets, which is exact group-element
dedup for the shallow crowns used here.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import lorentz
from .coxeter import CoxeterCell
from .errors import BudgetExceededError, GeometryError
from .horoball import Horoball, TwoHoroballConfig
from .inball import InscribedBall

KEY_QUANTUM = 1e-7


@dataclass(frozen=True)
class CrownSpec:
    """Expansion request: crown k = all cells at adjacency depth <= k."""

    depth: int
    mode: str = "face"
    max_cells: int = 20000

    def __post_init__(self):
        if self.depth < 0:
            raise GeometryError("crown depth must be nonnegative")
        if self.mode not in ("face", "vertex"):
            raise GeometryError("crown mode must be 'face' or 'vertex'")


@dataclass(frozen=True)
class CellInstance:
    word: tuple  # generator indices, identity = ()
    transform: np.ndarray
    vertices: np.ndarray  # images of the five polytope corners, rows
    normals: np.ndarray
    depth: int
    balls: tuple = ()  # transported Horoballs
    inball: InscribedBall | None = None


def generator(cell: CoxeterCell, i: int) -> np.ndarray:
    """Reflection matrix in the i-th face of the cell."""
    return lorentz.reflection_matrix(cell.face_normal(i))


def canonical_key(vertices: np.ndarray) -> tuple:
    """Projective, order-free fingerprint of a vertex set.

    Each vertex is scaled to unit Euclidean norm with a sign convention,
    quantized to KEY_QUANTUM, and the rows sorted; two instances collide
    exactly when their vertex sets agree projectively within the quantum.
    """
    rows = []
    for v in np.asarray(vertices, dtype=float):
        w = v / np.linalg.norm(v)
        for c in w:
            if abs(c) > 1e-8:
                if c < 0:
                    w = -w
                break
        rows.append(tuple(int(round(c / KEY_QUANTUM)) for c in w))
    rows.sort()
    return tuple(rows)


def _transported(cell: CoxeterCell, m: np.ndarray, word, depth, packing) -> CellInstance:
    if np.max(np.abs(m.T @ lorentz.J @ m - lorentz.J)) > 1e-10:
        raise GeometryError("transform drifted off the Lorentz group")
    balls = ()
    inball_img = None
    if packing is not None:
        if isinstance(packing, Horoball):
            balls = (Horoball(center=m @ packing.center, b=m @ packing.b),)
        elif isinstance(packing, TwoHoroballConfig):
            balls = tuple(
                Horoball(center=m @ b.center, b=m @ b.b) for b in packing.balls
            )
        elif isinstance(packing, InscribedBall):
            inball_img = InscribedBall(
                center=lorentz.normalize_proper(m @ packing.center),
                radius=packing.radius,
                tangent_faces=packing.tangent_faces,
                bisector_choice=packing.bisector_choice,
            )
        else:
            raise GeometryError("unsupported packing object")
    return CellInstance(
        word=tuple(word),
        transform=m,
        vertices=cell.polytope_vertices() @ m.T,
        normals=cell.normals @ m.T,
        depth=depth,
        balls=balls,
        inball=inball_img,
    )


def expand(cell: CoxeterCell, crown: CrownSpec, packing=None) -> list:
    """All distinct cell images within the requested crown.

    Face mode: breadth-first over words, depth = face-adjacency distance.
    Vertex mode: cells sharing at least one corner count as adjacent; the
    word search still runs by faces (up to 2*depth+2 letters), so crowns
    around ideal vertices, whose stabilizers are infinite, are truncated at
    the cell budget.
    """
    gens = [generator(cell, i) for i in range(5)]
    base = _transported(cell, np.eye(4), (), 0, packing)
    if crown.mode == "face":
        instances = _bfs_faces(cell, gens, base, crown.depth, crown.max_cells, packing)
    else:
        pool = _bfs_faces(
            cell, gens, base, 2 * crown.depth + 2, crown.max_cells, packing
        )
        instances = _filter_vertex_crown(pool, crown.depth)
    instances.sort(key=lambda inst: (len(inst.word), inst.word))
    return instances


def _bfs_faces(cell, gens, base, depth, max_cells, packing):
    seen = {canonical_key(base.vertices)}
    out = [base]
    queue = deque([base])
    while queue:
        cur = queue.popleft()
        if cur.depth >= depth:
            continue
        for i in range(5):
            m = cur.transform @ gens[i]
            inst = _transported(cell, m, cur.word + (i,), cur.depth + 1, packing)
            key = canonical_key(inst.vertices)
            if key in seen:
                continue
            if len(out) >= max_cells:
                raise BudgetExceededError(
                    f"expansion exceeded the cap of {max_cells} cells"
                )
            seen.add(key)
            out.append(inst)
            queue.append(inst)
    return out


def _vertex_keys(inst: CellInstance):
    keys = set()
    for v in inst.vertices:
        w = v / np.linalg.norm(v)
        for c in w:
            if abs(c) > 1e-8:
                if c < 0:
                    w = -w
                break
        keys.add(tuple(int(round(c / KEY_QUANTUM)) for c in w))
    return keys


def _filter_vertex_crown(pool, depth):
    levels = {0: [pool[0]]}
    assigned = {canonical_key(pool[0].vertices): 0}
    frontier_vertices = _vertex_keys(pool[0])
    rest = pool[1:]
    for level in range(1, depth + 1):
        layer = []
        for inst in rest:
            key = canonical_key(inst.vertices)
            if key in assigned:
                continue
            if _vertex_keys(inst) & frontier_vertices:
                assigned[key] = level
                layer.append(inst)
        if not layer:
            break
        levels[level] = layer
        for inst in layer:
            frontier_vertices |= _vertex_keys(inst)
    out = []
    for level in sorted(levels):
        for inst in levels[level]:
            out.append(
                CellInstance(
                    word=inst.word,
                    transform=inst.transform,
                    vertices=inst.vertices,
                    normals=inst.normals,
                    depth=level,
                    balls=inst.balls,
                    inball=inst.inball,
                )
            )
    return out


def distinct_balls(instances) -> list:
    """Transported horoballs with duplicates removed.

    Reflections in faces through a ball's center fix the ball, so neighbour
    cells often carry the same image; keys quantize the raw b vector (its
    scale is meaningful, so no projective normalization here).
    """
    seen = set()
    out = []
    for inst in instances:
        for ball in inst.balls:
            key = tuple(int(round(c / KEY_QUANTUM)) for c in ball.b)
            if key not in seen:
                seen.add(key)
                out.append(ball)
    return out


def distinct_inballs(instances) -> list:
    seen = set()
    out = []
    for inst in instances:
        if inst.inball is None:
            continue
        key = tuple(int(round(c / KEY_QUANTUM)) for c in inst.inball.center)
        if key not in seen:
            seen.add(key)
            out.append(inst.inball)
    return out
