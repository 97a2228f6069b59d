"""Input validation, serialization round-trips, meta-formation structure."""
import json

import pytest
from hypothesis import given, strategies as st

from metaform.errors import InputError
from metaform.graph import (
    Formation,
    MetaFormation,
    export_dot,
    export_formation,
    export_meta_formation,
    parse_formation,
    parse_meta_formation,
)

from conftest import singleton, triangle


class TestFormationValidation:
    def test_self_loop_rejected(self):
        with pytest.raises(InputError):
            Formation(vertices=(1,), edges=((1, 1),))

    def test_duplicate_directed_edge_rejected(self):
        with pytest.raises(InputError):
            Formation(vertices=(1, 2), edges=((1, 2), (1, 2)))

    def test_opposite_direction_on_same_pair_rejected(self):
        # One distance constraint per unordered pair, one responsible agent.
        with pytest.raises(InputError):
            Formation(vertices=(1, 2), edges=((1, 2), (2, 1)))

    def test_undeclared_endpoint_rejected(self):
        with pytest.raises(InputError):
            Formation(vertices=(1, 2), edges=((1, 3),))

    def test_duplicate_vertex_rejected(self):
        with pytest.raises(InputError):
            Formation(vertices=(1, 1), edges=())

    def test_out_degrees_count_tails_only(self):
        f = triangle()
        assert f.out_degrees() == {1: 0, 2: 1, 3: 2}

    def test_underlying_normalizes_pairs(self):
        f = Formation(vertices=(1, 2, 3), edges=((3, 1), (2, 3)))
        assert set(f.underlying().edges) == {(1, 3), (2, 3)}


class TestMetaFormationValidation:
    def test_overlapping_meta_vertices_rejected(self):
        with pytest.raises(InputError):
            MetaFormation(
                meta_vertices=(singleton(1), singleton(1)), inter_edges=()
            )

    def test_inter_edge_within_one_meta_vertex_rejected(self):
        with pytest.raises(InputError):
            MetaFormation(
                meta_vertices=(triangle(1), singleton(9)),
                inter_edges=((1, 2),),
            )

    def test_inter_edge_unknown_vertex_rejected(self):
        with pytest.raises(InputError):
            MetaFormation(
                meta_vertices=(triangle(1), singleton(9)),
                inter_edges=((1, 42),),
            )

    def test_opposite_direction_inter_edges_rejected(self):
        with pytest.raises(InputError):
            MetaFormation(
                meta_vertices=(triangle(1), triangle(4)),
                inter_edges=((1, 4), (4, 1)),
            )

    def test_flatten_preserves_vertices_and_edges(self):
        meta = MetaFormation(
            meta_vertices=(triangle(1), singleton(9)),
            inter_edges=((9, 1), (9, 2)),
        )
        flat = meta.flatten()
        assert set(flat.vertices) == {1, 2, 3, 9}
        assert len(flat.edges) == 3 + 2

    def test_owner_of(self):
        meta = MetaFormation(
            meta_vertices=(triangle(1), singleton(9)), inter_edges=()
        )
        assert meta.owner_of(2) == 0
        assert meta.owner_of(9) == 1


class TestSerialization:
    def test_parse_rejects_malformed_json(self):
        with pytest.raises(InputError):
            parse_formation("{not json")

    def test_parse_rejects_missing_fields(self):
        with pytest.raises(InputError):
            parse_formation(json.dumps({"edges": []}))

    def test_formation_round_trip(self):
        f = triangle()
        assert parse_formation(export_formation(f)) == f

    def test_meta_round_trip(self):
        meta = MetaFormation(
            meta_vertices=(triangle(1), triangle(4)),
            inter_edges=((1, 4), (1, 5), (4, 2)),
        )
        assert parse_meta_formation(export_meta_formation(meta)) == meta

    def test_dot_marks_inter_edges_dashed(self):
        meta = MetaFormation(
            meta_vertices=(triangle(1), singleton(9)), inter_edges=((9, 1),)
        )
        dot = export_dot(meta)
        assert "style=dashed" in dot
        assert "subgraph cluster_0" in dot

    def test_dot_formation_lists_all_edges(self):
        dot = export_dot(triangle())
        assert dot.count("->") == 3


@st.composite
def formations(draw, max_vertices=8):
    n = draw(st.integers(min_value=1, max_value=max_vertices))
    vertices = tuple(range(1, n + 1))
    pairs = [(i, j) for i in vertices for j in vertices if i < j]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    flips = draw(st.lists(st.booleans(), min_size=len(chosen), max_size=len(chosen)))
    edges = tuple(
        (b, a) if flip else (a, b) for (a, b), flip in zip(chosen, flips)
    )
    return Formation(vertices=vertices, edges=edges)


class TestProperties:
    @given(formations())
    def test_export_parse_round_trip(self, f):
        assert parse_formation(export_formation(f)) == f

    @given(formations(max_vertices=5), formations(max_vertices=5))
    def test_flatten_vertex_count_is_sum(self, a, b):
        b_shift = Formation(
            vertices=tuple(v + 100 for v in b.vertices),
            edges=tuple((t + 100, h + 100) for t, h in b.edges),
        )
        meta = MetaFormation(meta_vertices=(a, b_shift), inter_edges=())
        assert len(meta.flatten().vertices) == len(a.vertices) + len(b.vertices)
