"""Seeded generators for test formations.

Growth-based kinds use vertex addition: every new vertex attaches to
`dim` existing vertices, which preserves minimal rigidity (undirected)
and minimal persistence (when the new edges all point outward from the
new vertex).  Outputs are self-checked before emission.
"""
from __future__ import annotations

import random

from .errors import InputError
from .graph import Formation
from .persistence import is_persistent
from .rigidity import DEFAULT_SEED, DEFAULT_TRIALS, laman_check_2d

GEN_KINDS = (
    "min-rigid-2d",
    "min-persistent-2d",
    "min-persistent-3d",
    "tetra",
    "banana",
)


def tetra() -> Formation:
    """K4 with every edge oriented from higher to lower id."""
    vs = (1, 2, 3, 4)
    return Formation(
        vertices=vs, edges=tuple((j, i) for i in vs for j in vs if j > i)
    )


def banana() -> Formation:
    """The 8-vertex, 18-edge graph that defeats 3D counting conditions.

    Two triangles {3,4,5} and {6,7,8}, each vertex also connected to both
    axis vertices 1 and 2; the axis pair itself is not an edge, so {1,2}
    is a separating pair.
    """
    edges = []
    for tri in ((3, 4, 5), (6, 7, 8)):
        a, b, c = tri
        edges += [(b, a), (c, a), (c, b)]
        for v in tri:
            edges += [(v, 1), (v, 2)]
    return Formation(vertices=tuple(range(1, 9)), edges=tuple(edges))


def _grown(n: int, dim: int, seed: int, directed: bool) -> Formation:
    if n < dim:
        raise InputError(f"need at least {dim} vertices for this kind, got {n}")
    rng = random.Random(seed)
    vertices = list(range(1, dim + 1))
    # Complete seed graph on dim vertices (edge in 2D, triangle in 3D),
    # oriented higher to lower so the first vertex is the lone leader.
    edges = [(j, i) for i in vertices for j in vertices if j > i]
    for v in range(dim + 1, n + 1):
        targets = rng.sample(vertices, dim)
        edges += [(v, t) for t in sorted(targets)]
        vertices.append(v)
    if not directed:
        # Scramble directions; rigidity ignores them anyway.
        edges = [e if rng.random() < 0.5 else (e[1], e[0]) for e in edges]
    return Formation(vertices=tuple(vertices), edges=tuple(edges))


def gen(
    kind: str,
    n: int = 4,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_TRIALS,
) -> Formation:
    """Deterministic per (kind, n, seed); advertised properties self-checked."""
    if kind == "tetra":
        f = tetra()
    elif kind == "banana":
        f = banana()
    elif kind == "min-rigid-2d":
        f = _grown(n, 2, seed, directed=False)
        if not laman_check_2d(f.underlying()).minimally_rigid:
            raise AssertionError("generator produced a non-minimally-rigid graph")
    elif kind == "min-persistent-2d":
        f = _grown(n, 2, seed, directed=True)
        v = is_persistent(f, 2, seed=seed, trials=trials)
        if not (v.persistent and v.minimally_persistent):
            raise AssertionError("generator produced a non-minimally-persistent graph")
    elif kind == "min-persistent-3d":
        f = _grown(n, 3, seed, directed=True)
        v = is_persistent(f, 3, seed=seed, trials=trials)
        if not (v.persistent and v.minimally_persistent):
            raise AssertionError("generator produced a non-minimally-persistent graph")
    else:
        raise InputError(f"unknown generator kind {kind!r}, expected one of {GEN_KINDS}")
    return f
