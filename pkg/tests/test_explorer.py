"""Hierarchy assembly, filter algebra, layout geometry, zoom, serialization."""
from __future__ import annotations

import math
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supportlens.corpus import Comment, Post
from supportlens.errors import StaleViewError, ValidationError
from supportlens.explorer import (
    CircleNode,
    SupportFilter,
    apply_filter,
    build_hierarchy,
    histogram,
    iter_nodes,
    pack,
    serialize_view,
    zoom,
)
from supportlens.labeling import CommentSupport, LabelStore, PostSupport
from supportlens.schemas import validate
from supportlens.search import SearchResult
from supportlens.similarity import PairSet, SimilarPair
from supportlens.topics import KeywordSet, TopicAssignment

LEVELS = ("high", "medium", "low")


class FakeStore:
    """Just enough of the corpus store for hierarchy assembly."""

    def __init__(self, posts: dict[str, tuple[Post, list[Comment]]]):
        self._posts = posts

    def get_post(self, post_id: str):
        return self._posts[post_id]


def _post(pid: str, comment_ids: tuple[str, ...], title: str = "") -> Post:
    return Post(id=pid, title=title or f"title {pid}", body=f"body {pid}",
                created_utc=0, comment_ids=comment_ids)


def _comment(cid: str, pid: str) -> Comment:
    return Comment(id=cid, post_id=pid, body=f"body {cid}", created_utc=0, depth=0)


def make_world():
    """Two topics, three posts, three comments, hand-set labels."""
    store = FakeStore({
        "pA": (_post("pA", ("cA1", "cA2")),
               [_comment("cA1", "pA"), _comment("cA2", "pA")]),
        "pB": (_post("pB", ("cB1",)), [_comment("cB1", "pB")]),
        "pC": (_post("pC", ()), []),
    })
    labels = LabelStore(
        posts={
            "pA": PostSupport("high", "low"),
            "pB": PostSupport("low", "high"),
            "pC": PostSupport("medium", "medium"),
        },
        comments={
            "cA1": CommentSupport("high", "high"),
            "cA2": CommentSupport("high", "low"),
            "cB1": CommentSupport("low", "high"),
        },
        provider_name="test",
    )
    results = [SearchResult("pA", 3.0, 1), SearchResult("pB", 2.0, 2),
               SearchResult("pC", 1.0, 3)]
    assignments = [TopicAssignment("pA", 0, 0.9), TopicAssignment("pB", 0, 0.8),
                   TopicAssignment("pC", 1, 0.7)]
    keyword_sets = [KeywordSet(0, ("sleep", "exam")), KeywordSet(1, ("walk",))]
    tree = build_hierarchy(results, assignments, labels, store, keyword_sets)
    return store, labels, tree


def snapshot(node: CircleNode):
    """Structure/weight fingerprint for equality checks."""
    return (node.level, node.ref_id, node.weight,
            tuple(snapshot(c) for c in node.children))


# -- hierarchy assembly ----------------------------------------------------


def test_build_hierarchy_structure():
    _, _, tree = make_world()
    assert tree.level == "root" and tree.ref_id == "root"
    assert tree.weight == 3  # total posts
    assert [t.ref_id for t in tree.children] == ["topic-0", "topic-1"]
    t0, t1 = tree.children
    assert t0.weight == 2 and t1.weight == 1
    assert t0.keywords == ("sleep", "exam") and t1.keywords == ("walk",)
    pa = t0.children[0]
    assert pa.ref_id == "pA" and pa.weight == 2 and pa.rank == 1
    assert pa.title == "title pA"
    assert [c.ref_id for c in pa.children] == ["cA1", "cA2"]
    assert all(c.weight == 1 and c.level == "comment" for c in pa.children)
    assert tree.children[1].children[0].weight == 0  # pC has no comments


def test_build_hierarchy_missing_assignment():
    store, labels, _ = make_world()
    results = [SearchResult("pA", 1.0, 1)]
    with pytest.raises(ValidationError, match=r"assignments missing for posts: \['pA'\]"):
        build_hierarchy(results, [], labels, store)


def test_iter_nodes_by_level():
    _, _, tree = make_world()
    assert [n.ref_id for n in iter_nodes(tree, "post")] == ["pA", "pB", "pC"]
    assert [n.ref_id for n in iter_nodes(tree, "comment")] == ["cA1", "cA2", "cB1"]
    assert len(list(iter_nodes(tree))) == 1 + 2 + 3 + 3


# -- filter algebra --------------------------------------------------------


def test_empty_filter_is_identity():
    _, _, tree = make_world()
    assert snapshot(apply_filter(tree, SupportFilter())) == snapshot(tree)


def test_filter_idempotence():
    _, _, tree = make_world()
    filt = SupportFilter.of(("seeking", "emotional", "high"),
                            ("providing", "informational", "high"))
    once = apply_filter(tree, filt)
    twice = apply_filter(once, filt)
    assert snapshot(once) == snapshot(twice)


def test_full_union_within_kind_is_identity():
    _, _, tree = make_world()
    filt = SupportFilter.of(*[("seeking", "emotional", lvl) for lvl in LEVELS])
    assert snapshot(apply_filter(tree, filt)) == snapshot(tree)
    filt = SupportFilter.of(*[("providing", "informational", lvl) for lvl in LEVELS])
    assert snapshot(apply_filter(tree, filt)) == snapshot(tree)


def test_union_within_kind_selects_posts():
    _, _, tree = make_world()
    filt = SupportFilter.of(("seeking", "emotional", "high"),
                            ("seeking", "emotional", "medium"))
    got = apply_filter(tree, filt)
    assert [p.ref_id for p in iter_nodes(got, "post")] == ["pA", "pC"]
    # pB went away, so topic-0 now weighs 1; root still counts posts.
    t0 = got.children[0]
    assert t0.ref_id == "topic-0" and t0.weight == 1
    assert got.weight == 2


def test_cross_kind_intersection_on_comments():
    # Both "high" bars selected: only comments high in *both* kinds stay.
    _, _, tree = make_world()
    filt = SupportFilter.of(("providing", "emotional", "high"),
                            ("providing", "informational", "high"))
    got = apply_filter(tree, filt)
    assert [c.ref_id for c in iter_nodes(got, "comment")] == ["cA1"]
    # Posts are untouched by providing selections; weights follow comments.
    posts = {p.ref_id: p for p in iter_nodes(got, "post")}
    assert set(posts) == {"pA", "pB", "pC"}
    assert posts["pA"].weight == 1 and posts["pB"].weight == 0
    assert got.weight == 3


def test_directions_filter_independently_then_cascade():
    _, _, tree = make_world()
    filt = SupportFilter.of(("seeking", "emotional", "high"),
                            ("providing", "informational", "high"))
    got = apply_filter(tree, filt)
    # Only pA passes seeking; of its comments only cA1 is informational-high.
    assert [p.ref_id for p in iter_nodes(got, "post")] == ["pA"]
    assert [c.ref_id for c in iter_nodes(got, "comment")] == ["cA1"]
    assert [t.ref_id for t in got.children] == ["topic-0"]


def test_filter_never_drops_root_but_drops_empty_topics():
    _, _, tree = make_world()
    filt = SupportFilter.of(("seeking", "emotional", "high"),
                            ("seeking", "informational", "high"))
    got = apply_filter(tree, filt)  # no post is high in both kinds
    assert got.level == "root" and got.children == []
    assert got.weight == 0


def test_filter_widening_within_kind_is_monotone():
    _, _, tree = make_world()
    narrow = SupportFilter.of(("seeking", "emotional", "high"))
    wide = SupportFilter.of(("seeking", "emotional", "high"),
                            ("seeking", "emotional", "medium"))
    kept_narrow = {p.ref_id for p in iter_nodes(apply_filter(tree, narrow), "post")}
    kept_wide = {p.ref_id for p in iter_nodes(apply_filter(tree, wide), "post")}
    assert kept_narrow <= kept_wide


def test_filter_validation():
    with pytest.raises(ValidationError, match="bad filter selection"):
        SupportFilter.of(("seeking", "emotional", "huge"))
    with pytest.raises(ValidationError, match="bad filter selection"):
        SupportFilter.of(("lending", "emotional", "high"))
    with pytest.raises(ValidationError, match="bad filter selection"):
        SupportFilter.of(("seeking", "surgical", "high"))


levels_st = st.sampled_from(LEVELS)
selection_st = st.tuples(
    st.sampled_from(["seeking", "providing"]),
    st.sampled_from(["emotional", "informational"]),
    levels_st,
)


@settings(max_examples=60, deadline=None)
@given(
    post_labels=st.lists(st.tuples(levels_st, levels_st), min_size=1, max_size=8),
    comment_shape=st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=8),
    comment_labels=st.lists(st.tuples(levels_st, levels_st), min_size=24, max_size=24),
    selections=st.frozensets(selection_st, max_size=6),
)
def test_filter_matches_brute_force_oracle(post_labels, comment_shape,
                                           comment_labels, selections):
    n_posts = min(len(post_labels), len(comment_shape))
    posts = {}
    labels_posts = {}
    labels_comments = {}
    results = []
    assignments = []
    flat_comment_labels = iter(comment_labels)
    for i in range(n_posts):
        pid = f"p{i}"
        cids = tuple(f"p{i}c{j}" for j in range(comment_shape[i]))
        posts[pid] = (_post(pid, cids), [_comment(c, pid) for c in cids])
        labels_posts[pid] = PostSupport(*post_labels[i])
        for cid in cids:
            labels_comments[cid] = CommentSupport(*next(flat_comment_labels))
        results.append(SearchResult(pid, float(n_posts - i), i + 1))
        assignments.append(TopicAssignment(pid, i % 2, 0.5))
    store = FakeStore(posts)
    labels = LabelStore(labels_posts, labels_comments, "test")
    tree = build_hierarchy(results, assignments, labels, store)
    filt = SupportFilter(frozenset(selections))
    got = apply_filter(tree, filt)

    def oracle_allows(direction: str, item_labels) -> bool:
        for kind in ("emotional", "informational"):
            chosen = {lvl for d, k, lvl in selections if d == direction and k == kind}
            if chosen and item_labels.level_for(kind) not in chosen:
                return False
        return True

    expect_posts = {p for p in labels_posts if oracle_allows("seeking", labels_posts[p])}
    expect_comments = {
        c for c, lab in labels_comments.items()
        if c.split("c")[0] in expect_posts and oracle_allows("providing", lab)
    }
    assert {p.ref_id for p in iter_nodes(got, "post")} == expect_posts
    assert {c.ref_id for c in iter_nodes(got, "comment")} == expect_comments
    # Weights recomputed, topics pruned when childless, root always present.
    assert got.level == "root"
    for topic in got.children:
        assert topic.children, "childless topic survived"
        assert topic.weight == len(topic.children)
    for post in iter_nodes(got, "post"):
        assert post.weight == len(post.children)
    assert got.weight == sum(t.weight for t in got.children)
    assert snapshot(apply_filter(got, filt)) == snapshot(got)


# -- histograms ------------------------------------------------------------


def test_histogram_topic_level_counts_posts():
    _, _, tree = make_world()
    h = histogram(tree, "topic")
    assert h.direction == "seeking"
    assert h.counts["emotional"] == {"high": 1, "medium": 1, "low": 1}
    assert h.counts["informational"] == {"high": 1, "medium": 1, "low": 1}
    assert h.total("emotional") == 3
    assert histogram(tree, "post").counts == h.counts


def test_histogram_comment_level_counts_comments():
    _, _, tree = make_world()
    pa = next(iter_nodes(tree, "post"))
    h = histogram(pa, "comment")
    assert h.direction == "providing"
    assert h.counts["emotional"] == {"high": 2, "medium": 0, "low": 0}
    assert h.counts["informational"] == {"high": 1, "medium": 0, "low": 1}


def test_histogram_rejects_root_level():
    _, _, tree = make_world()
    with pytest.raises(ValidationError, match="no histogram for view level"):
        histogram(tree, "root")


# -- layout ----------------------------------------------------------------


def _walk_layout(circle, visit):
    visit(circle)
    for child in circle.children:
        _walk_layout(child, visit)


def test_pack_root_is_centered_unit_circle():
    _, _, tree = make_world()
    layout = pack(tree)
    assert (layout.x, layout.y, layout.r) == (0.5, 0.5, 0.5)
    assert layout.node is not None and layout.node.level == "root"


def test_pack_containment_and_sibling_separation():
    _, _, tree = make_world()
    layout = pack(tree)

    def check(circle):
        for child in circle.children:
            gap = math.hypot(child.x - circle.x, child.y - circle.y) + child.r
            assert gap <= circle.r + 1e-6
        for a, b in combinations(circle.children, 2):
            dist = math.hypot(a.x - b.x, a.y - b.y)
            assert a.r + b.r - dist <= 1e-6

    _walk_layout(layout, check)


def test_pack_radius_strictly_increases_with_weight():
    _, _, tree = make_world()
    layout = pack(tree)

    def check(circle):
        for a, b in combinations(circle.children, 2):
            wa, wb = a.node.weight, b.node.weight
            if wa > wb:
                assert a.r > b.r
            elif wa < wb:
                assert a.r < b.r
            else:
                assert a.r == pytest.approx(b.r, rel=1e-9)

    _walk_layout(layout, check)
    # The weight floor keeps zero-weight circles visible at half size.
    posts = {c.node.ref_id: c for t in layout.children for c in t.children}
    assert posts["pC"].r > 0
    assert posts["pC"].r < posts["pB"].r < posts["pA"].r


def test_pack_zero_weight_is_half_of_weight_one():
    tree = CircleNode("root", "root", 2, children=[
        CircleNode("topic", "topic-0", 2, children=[
            CircleNode("post", "w0", 0), CircleNode("post", "w1", 1),
        ]),
    ])
    layout = pack(tree)
    post_circles = {c.node.ref_id: c.r for c in layout.children[0].children}
    assert post_circles["w0"] == pytest.approx(post_circles["w1"] / 2, rel=1e-9)


# -- zoom ------------------------------------------------------------------


def test_zoom_levels_and_post_lists():
    _, _, tree = make_world()
    layout = pack(tree)
    root_view = zoom(tree, layout, [])
    assert root_view.level == "topic"
    assert root_view.path == ()
    assert root_view.post_list == ["pA", "pB", "pC"]  # rank order
    assert (root_view.layout.x, root_view.layout.y, root_view.layout.r) == (0.5, 0.5, 0.5)

    topic_view = zoom(tree, layout, ["topic-0"])
    assert topic_view.level == "post"
    assert topic_view.post_list == ["pA", "pB"]
    assert (topic_view.layout.x, topic_view.layout.y) == (0.5, 0.5)
    assert topic_view.layout.r == 0.5

    post_view = zoom(tree, layout, ["topic-0", "pA"])
    assert post_view.level == "comment"
    assert post_view.post_list == ["pA"]
    assert post_view.histogram.direction == "providing"


def test_zoom_path_too_deep():
    _, _, tree = make_world()
    layout = pack(tree)
    with pytest.raises(ValidationError, match="zoom path too deep"):
        zoom(tree, layout, ["topic-0", "pA", "cA1"])


def test_zoom_stale_path():
    _, _, tree = make_world()
    layout = pack(tree)
    with pytest.raises(StaleViewError, match="refresh"):
        zoom(tree, layout, ["topic-9"])
    # A filtered-out post is stale too, even though it exists unfiltered.
    filt = SupportFilter.of(("seeking", "emotional", "high"))
    filtered = apply_filter(tree, filt)
    filtered_layout = pack(filtered)
    with pytest.raises(StaleViewError, match="'pB'"):
        zoom(filtered, filtered_layout, ["topic-0", "pB"])


def test_zoom_histogram_scopes_to_subtree():
    _, _, tree = make_world()
    layout = pack(tree)
    topic_view = zoom(tree, layout, ["topic-0"])
    assert topic_view.histogram.total("emotional") == 2  # pA and pB only


# -- serialization ---------------------------------------------------------


def _world_pairs() -> PairSet:
    return PairSet(
        ["pA", "pB", "pC"],
        [SimilarPair("pA", "pB", 0.9), SimilarPair("pA", "pC", 0.7)],
        0.6,
        "test",
    )


def test_serialize_view_is_schema_valid():
    _, _, tree = make_world()
    layout = pack(tree)
    for path in ([], ["topic-0"], ["topic-0", "pA"]):
        payload = serialize_view(zoom(tree, layout, path), _world_pairs())
        validate(payload, "view")
        assert payload["schema_version"] == 1
        assert payload["path"] == path


def test_serialize_view_similar_ids_stay_in_cluster():
    _, _, tree = make_world()
    layout = pack(tree)
    payload = serialize_view(zoom(tree, layout, []), _world_pairs())
    topics = {t["ref_id"]: t for t in payload["tree"]["children"]}
    posts0 = {p["ref_id"]: p for p in topics["topic-0"]["children"]}
    posts1 = {p["ref_id"]: p for p in topics["topic-1"]["children"]}
    # pA pairs with both pB and pC, but pC sits in the other cluster.
    assert posts0["pA"]["similar_ids"] == ["pB"]
    assert posts0["pB"]["similar_ids"] == ["pA"]
    assert posts1["pC"]["similar_ids"] == []


def test_serialize_view_without_pairs():
    _, _, tree = make_world()
    layout = pack(tree)
    payload = serialize_view(zoom(tree, layout, []))
    validate(payload, "view")
    for topic in payload["tree"]["children"]:
        for post in topic["children"]:
            assert post["similar_ids"] == []


def test_serialize_view_carries_titles_keywords_weights():
    _, _, tree = make_world()
    layout = pack(tree)
    payload = serialize_view(zoom(tree, layout, []), _world_pairs())
    topics = payload["tree"]["children"]
    assert topics[0]["keywords"] == ["sleep", "exam"]
    pa = topics[0]["children"][0]
    assert pa["title"] == "title pA"
    assert pa["weight"] == 2
    assert {c["level"] for c in pa["children"]} == {"comment"}
    assert payload["histogram"]["counts"]["emotional"]["high"] == 1
