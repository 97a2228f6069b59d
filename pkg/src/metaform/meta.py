"""Meta-level analysis: classification, counting conditions, rigidity and
edge-optimality of merged graphs.

The 2D decision substitutes each multi-vertex meta-vertex by a canonical
minimally rigid spanning subgraph and runs the (2,3)-pebble game once on
the flattened graph; this is licensed by the fact that merged rigidity
does not depend on meta-vertex internals beyond their rigidity.  In 3D
the counting condition is only necessary, so the final verdict comes
from the rank oracle on the substituted graph; counting and rank
evidence are reported separately.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InputError, NotPersistentError, NotRigidError, ResourceLimitError
from .graph import Edge, Formation, MetaClass, MetaFormation, UndirectedView
from .persistence import is_persistent, local_dof_compliance
from .rigidity import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    PebbleGame2D,
    laman_check_2d,
    minimally_rigid_spanning,
    rigid_3d_check,
)

SUBSET_SEARCH_CAP = 18


def classify(
    meta: MetaFormation,
    dim: int,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_TRIALS,
) -> MetaClass:
    """Partition meta-vertex indices into (N, S) for 2D or (N, D, S) for 3D.

    Every multi-vertex meta-vertex must be rigid in the dimension; in 3D
    a two-vertex meta-vertex must contain its internal edge.
    """
    if dim not in (2, 3):
        raise InputError(f"dimension must be 2 or 3, got {dim}")
    n_class, d_class, s_class = [], [], []
    for i, mv in enumerate(meta.meta_vertices):
        size = len(mv.vertices)
        if size == 1:
            s_class.append(i)
            continue
        if dim == 3 and size == 2:
            if not mv.edges:
                raise NotRigidError(
                    f"meta-vertex {i} has two vertices but no edge; not rigid in 3D"
                )
            d_class.append(i)
            continue
        view = mv.underlying()
        verdict = (
            laman_check_2d(view)
            if dim == 2
            else rigid_3d_check(view, seed=seed, trials=trials)
        )
        if not verdict.rigid:
            raise NotRigidError(f"meta-vertex {i} is not rigid in {dim}D")
        n_class.append(i)
    return MetaClass(
        n_class=tuple(n_class),
        d_class=tuple(d_class),
        s_class=tuple(s_class),
        dim=dim,
    )


def merge_bound(cls: MetaClass) -> int:
    """Minimal inter-edge count for a rigid merging of the classified collection."""
    if cls.dim == 2:
        return 3 * len(cls.n_class) + 2 * len(cls.s_class) - 3
    return 6 * len(cls.n_class) + 5 * len(cls.d_class) + 3 * len(cls.s_class) - 6


@dataclass(frozen=True)
class MetaCount:
    """Class counts of the meta-vertices touched by an inter-edge subset."""

    i_class: tuple[int, ...]
    j_class: tuple[int, ...]
    k_class: tuple[int, ...] = ()
    incident_vertices: int = 0

    def bound(self, dim: int) -> int:
        if dim == 2:
            return 3 * len(self.i_class) + 2 * len(self.j_class) - 3
        return (
            6 * len(self.i_class)
            + 5 * len(self.j_class)
            + 3 * len(self.k_class)
            - 6
        )


def meta_count(meta: MetaFormation, subset, dim: int) -> MetaCount:
    """Classify each touched meta-vertex by its incident vertices.

    2D: I has >= 2 incident vertices, J exactly one.  3D: I has >= 3
    incident vertices or exactly two unconnected ones, J exactly two
    connected ones, K exactly one.
    """
    incident: dict[int, set[int]] = {}
    for t, h in subset:
        incident.setdefault(meta.owner_of(t), set()).add(t)
        incident.setdefault(meta.owner_of(h), set()).add(h)
    i_class, j_class, k_class = [], [], []
    total = 0
    for idx in sorted(incident):
        verts = incident[idx]
        total += len(verts)
        if dim == 2:
            (i_class if len(verts) >= 2 else j_class).append(idx)
            continue
        if len(verts) == 1:
            k_class.append(idx)
        elif len(verts) == 2:
            a, b = sorted(verts)
            internal = {(min(t, h), max(t, h)) for t, h in meta.meta_vertices[idx].edges}
            (j_class if (a, b) in internal else i_class).append(idx)
        else:
            i_class.append(idx)
    return MetaCount(
        i_class=tuple(i_class),
        j_class=tuple(j_class),
        k_class=tuple(k_class),
        incident_vertices=total,
    )


def meta_count_violation(meta: MetaFormation, subset, dim: int) -> MetaCount | None:
    """The subset's MetaCount if it violates the counting bound, else None.

    The bound derives from counts on the incident vertex set and is only
    meaningful when that set has at least dim vertices; smaller subsets
    are never violations.
    """
    if not subset:
        return None
    count = meta_count(meta, subset, dim)
    if count.incident_vertices < dim:
        return None
    if len(subset) > count.bound(dim):
        return count
    return None


def meta_count_violation_3d(meta: MetaFormation, subset) -> MetaCount | None:
    return meta_count_violation(meta, subset, 3)


@dataclass(frozen=True)
class MetaVerdict:
    rigid: bool
    edge_optimal: bool
    dim: int
    classes: MetaClass
    bound: int
    selected_subset: tuple[Edge, ...] | None = None
    witness_subset: tuple[Edge, ...] | None = None
    rank_deficit: tuple[int, int] | None = None
    separating_pair: tuple[int, int] | None = None
    # 3D only: True/False for the counting screen, None when skipped.
    counting_ok: bool | None = None

    def to_dict(self) -> dict:
        d = {
            "rigid": self.rigid,
            "edgeOptimal": self.edge_optimal,
            "dim": self.dim,
            "classes": {
                "N": list(self.classes.n_class),
                "D": list(self.classes.d_class),
                "S": list(self.classes.s_class),
            },
            "bound": self.bound,
        }
        if self.selected_subset is not None:
            d["selectedSubset"] = [list(e) for e in self.selected_subset]
        if self.witness_subset is not None:
            d["witnessSubset"] = [list(e) for e in self.witness_subset]
        if self.rank_deficit is not None:
            d["rankDeficit"] = {
                "observed": self.rank_deficit[0],
                "required": self.rank_deficit[1],
            }
        if self.separating_pair is not None:
            d["separatingPair"] = list(self.separating_pair)
        if self.counting_ok is not None or self.dim == 3:
            d["countingOk"] = self.counting_ok
        return d


def _gadget_substitute(
    meta: MetaFormation, dim: int, seed: int, trials: int
) -> tuple[MetaFormation, tuple[tuple[Edge, ...], ...]]:
    """Replace multi-vertex internals by canonical minimally rigid subgraphs.

    Pebble-game (or rank) filtering of each meta-vertex's own edges in
    declared order keeps substitution deterministic.
    """
    gadgets = []
    fixed = []
    for mv in meta.meta_vertices:
        if len(mv.vertices) == 1 or (dim == 3 and len(mv.vertices) == 2):
            gadgets.append(mv)
            if mv.edges:
                fixed.append(tuple((min(e), max(e)) for e in mv.edges))
            continue
        spanning = minimally_rigid_spanning(
            mv.underlying(), dim, seed=seed, trials=trials
        )
        gadgets.append(Formation(vertices=mv.vertices, edges=spanning))
        fixed.append(spanning)
    return (
        MetaFormation(meta_vertices=tuple(gadgets), inter_edges=meta.inter_edges),
        tuple(fixed),
    )


def _smallest_violating_subset(
    meta: MetaFormation, dim: int, cap: int = SUBSET_SEARCH_CAP
) -> tuple[Edge, ...] | None:
    edges = meta.inter_edges
    if len(edges) > cap:
        return None
    for size in range(1, len(edges) + 1):
        for subset in itertools.combinations(edges, size):
            if meta_count_violation(meta, subset, dim) is not None:
                return subset
    return None


def meta_rigid_2d(
    meta: MetaFormation,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_TRIALS,
) -> MetaVerdict:
    """2D merged-rigidity via gadget substitution and one pebble game run.

    The independent inter-edges retained by the pebble game form the
    selected subset E_M', which has exactly the counting-bound size
    whenever the merge is rigid.
    """
    cls = classify(meta, 2, seed=seed, trials=trials)
    flat = meta.flatten()
    n = len(flat.vertices)
    if n < 2:
        raise InputError("merged graph needs at least two vertices")
    bound = merge_bound(cls)
    substituted, fixed = _gadget_substitute(meta, 2, seed, trials)
    game = PebbleGame2D(flat.vertices)
    for group in fixed:
        for e in group:
            if not game.insert(e):
                raise AssertionError("disjoint minimally rigid gadgets must be independent")
    selected = []
    for e in meta.inter_edges:
        if game.insert((min(e), max(e))):
            selected.append(e)
    target = 2 * n - 3 if n > 2 else 1
    rigid = game.rank() == target
    edge_optimal = rigid and len(meta.inter_edges) == bound
    if rigid:
        return MetaVerdict(
            rigid=True,
            edge_optimal=edge_optimal,
            dim=2,
            classes=cls,
            bound=bound,
            selected_subset=tuple(selected),
        )
    witness = _smallest_violating_subset(meta, 2)
    return MetaVerdict(
        rigid=False,
        edge_optimal=False,
        dim=2,
        classes=cls,
        bound=bound,
        witness_subset=witness,
        rank_deficit=(game.rank(), target),
    )


def _counting_screen_3d(
    meta: MetaFormation, bound: int, cap: int
) -> tuple[bool | None, tuple[Edge, ...] | None]:
    """Search for a bound-sized subset all of whose subsets pass the count.

    Subset DP over bitmasks: a set is bad if it violates the count or
    contains a bad subset.  Returns (screen result or None if skipped,
    witness when every candidate contains a violation).
    """
    edges = meta.inter_edges
    m = len(edges)
    if m > cap:
        return None, None
    if bound > m or bound < 0:
        return False, None
    bad = [False] * (1 << m)
    first_violation = None
    for mask in range(1, 1 << m):
        subset = tuple(edges[i] for i in range(m) if mask >> i & 1)
        if any(bad[mask & ~(1 << i)] for i in range(m) if mask >> i & 1):
            bad[mask] = True
            continue
        if meta_count_violation(meta, subset, 3) is not None:
            bad[mask] = True
            if first_violation is None:
                first_violation = subset
    for mask in range(1 << m):
        if bin(mask).count("1") == bound and not bad[mask]:
            return True, None
    return False, first_violation


def meta_rigid_3d(
    meta: MetaFormation,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_TRIALS,
    subset_cap: int = SUBSET_SEARCH_CAP,
) -> MetaVerdict:
    """3D merged-rigidity: necessary counting screen plus rank oracle.

    Counting success alone never implies rigidity (the double banana
    satisfies every count), so the verdict always rests on the rank
    oracle applied to the gadget-substituted flattened graph; the
    counting certificate is reported alongside, or marked skipped when
    the inter-edge set exceeds the subset-search cap.
    """
    cls = classify(meta, 3, seed=seed, trials=trials)
    flat = meta.flatten()
    if len(flat.vertices) < 3:
        raise InputError("merged graph needs at least three vertices")
    bound = merge_bound(cls)
    counting_ok, count_witness = _counting_screen_3d(meta, bound, subset_cap)
    substituted, fixed = _gadget_substitute(meta, 3, seed, trials)
    sub_flat = substituted.flatten()
    verdict = rigid_3d_check(sub_flat.underlying(), seed=seed, trials=trials)
    rigid = verdict.rigid
    if counting_ok is False:
        rigid = False
    selected = None
    if rigid:
        spanning = minimally_rigid_spanning(
            sub_flat.underlying(), 3, fixed=fixed, seed=seed, trials=trials
        )
        inter_pairs = {(min(e), max(e)): e for e in meta.inter_edges}
        selected = tuple(
            inter_pairs[e] for e in spanning if e in inter_pairs
        )
    edge_optimal = rigid and len(meta.inter_edges) == bound
    return MetaVerdict(
        rigid=rigid,
        edge_optimal=edge_optimal,
        dim=3,
        classes=cls,
        bound=bound,
        selected_subset=selected,
        witness_subset=count_witness if not rigid else None,
        rank_deficit=verdict.rank_deficit if not rigid else None,
        separating_pair=verdict.separating_pair,
        counting_ok=counting_ok,
    )


def meta_rigid(
    meta: MetaFormation,
    dim: int,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_TRIALS,
) -> MetaVerdict:
    if dim == 2:
        return meta_rigid_2d(meta, seed=seed, trials=trials)
    if dim == 3:
        return meta_rigid_3d(meta, seed=seed, trials=trials)
    raise InputError(f"dimension must be 2 or 3, got {dim}")


def edge_optimal_rigid(
    meta: MetaFormation,
    dim: int,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_TRIALS,
) -> bool:
    """Rigid and no inter-edge removable: |E_M| equals the counting bound."""
    verdict = meta_rigid(meta, dim, seed=seed, trials=trials)
    return verdict.rigid and len(meta.inter_edges) == verdict.bound


def edge_optimal_persistent(
    meta: MetaFormation,
    dim: int,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_TRIALS,
) -> bool:
    """Edge-optimal rigid merging whose inter-edges all leave local DOFs."""
    for i, mv in enumerate(meta.meta_vertices):
        if not is_persistent(mv, dim, seed=seed, trials=trials).persistent:
            raise NotPersistentError(f"meta-vertex {i} is not persistent in {dim}D")
    compliant, _ = local_dof_compliance(meta, dim)
    return compliant and edge_optimal_rigid(meta, dim, seed=seed, trials=trials)
