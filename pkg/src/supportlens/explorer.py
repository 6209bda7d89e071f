"""Hierarchy building, support filtering, histograms, layout, and zoom.

The exploration view is a three-level hierarchy (topic -> post -> comment)
under a synthetic root. Circle sizes encode counts: a topic weighs its
number of posts, a post its number of comments, comments weigh 1. The
layout is computed server-side in abstract [0,1]^2 unit space so clients
are pure renderers; the packed radius of a child is ``c * sqrt(weight)``
with a shared per-sibling-group constant ``c`` large enough that every
child contains its own packed children.

Filter semantics: within one support kind, selected levels form a union;
across kinds, constraints intersect. An item survives iff, for every kind
with at least one selected level of the item's direction, its label is in
that kind's selected set. Seeking selections filter posts, providing
selections filter comments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .corpus import CorpusStore
from .errors import StaleViewError, ValidationError
from .labeling import CommentSupport, KINDS, LabelStore, LEVELS, PostSupport
from .packing import pack_siblings
from .search import SearchResult
from .similarity import PairSet
from .topics import KeywordSet, TopicAssignment

LEVEL_ROOT = "root"
LEVEL_TOPIC = "topic"
LEVEL_POST = "post"
LEVEL_COMMENT = "comment"

# Weight floor for layout radii: weight-0 circles render at half the radius
# of weight-1 circles, keeping radius strictly increasing in weight.
_W_FLOOR = 0.25


@dataclass
class CircleNode:
    level: str
    ref_id: str
    weight: int
    children: list["CircleNode"] = field(default_factory=list)
    labels: PostSupport | CommentSupport | None = None
    keywords: tuple[str, ...] | None = None
    title: str | None = None
    rank: int | None = None


@dataclass(frozen=True)
class SupportFilter:
    selections: frozenset[tuple[str, str, str]] = frozenset()

    def __post_init__(self):
        for direction, kind, level in self.selections:
            if direction not in ("seeking", "providing") or kind not in KINDS or level not in LEVELS:
                raise ValidationError(f"bad filter selection {(direction, kind, level)!r}")

    @classmethod
    def of(cls, *selections: tuple[str, str, str]) -> "SupportFilter":
        return cls(frozenset(selections))

    def levels_for(self, direction: str, kind: str) -> frozenset[str]:
        return frozenset(
            lvl for d, k, lvl in self.selections if d == direction and k == kind
        )

    def allows(self, direction: str, labels: PostSupport | CommentSupport) -> bool:
        for kind in KINDS:
            selected = self.levels_for(direction, kind)
            if selected and labels.level_for(kind) not in selected:
                return False
        return True


@dataclass
class SupportHistogram:
    direction: str
    counts: dict[str, dict[str, int]]  # kind -> level -> count

    def total(self, kind: str) -> int:
        return sum(self.counts[kind].values())


def build_hierarchy(results: list[SearchResult],
                    assignments: list[TopicAssignment],
                    labels: LabelStore,
                    store: CorpusStore,
                    keyword_sets: list[KeywordSet] | None = None) -> CircleNode:
    """Assemble the root -> topic -> post -> comment tree for a result set."""
    topic_of = {a.post_id: a.topic_id for a in assignments}
    missing = [r.post_id for r in results if r.post_id not in topic_of]
    if missing:
        raise ValidationError(f"assignments missing for posts: {missing[:5]}")
    keywords_of = {ks.topic_id: ks.keywords for ks in (keyword_sets or [])}

    clusters: dict[int, list[SearchResult]] = {}
    for result in results:
        clusters.setdefault(topic_of[result.post_id], []).append(result)

    topic_nodes = []
    for topic_id in sorted(clusters):
        post_nodes = []
        for result in clusters[topic_id]:
            post, comments = store.get_post(result.post_id)
            comment_nodes = [
                CircleNode(
                    level=LEVEL_COMMENT,
                    ref_id=c.id,
                    weight=1,
                    labels=labels.comment_labels(c.id),
                )
                for c in comments
            ]
            post_nodes.append(
                CircleNode(
                    level=LEVEL_POST,
                    ref_id=post.id,
                    weight=len(comment_nodes),
                    children=comment_nodes,
                    labels=labels.post_labels(post.id),
                    title=post.title,
                    rank=result.rank,
                )
            )
        topic_nodes.append(
            CircleNode(
                level=LEVEL_TOPIC,
                ref_id=f"topic-{topic_id}",
                weight=len(post_nodes),
                children=post_nodes,
                keywords=keywords_of.get(topic_id),
            )
        )
    total_posts = sum(t.weight for t in topic_nodes)
    return CircleNode(level=LEVEL_ROOT, ref_id="root", weight=total_posts,
                      children=topic_nodes)


def apply_filter(node: CircleNode, filt: SupportFilter) -> CircleNode:
    """Return a pruned copy; the node itself is never removed."""
    return _filter_copy(node, filt)


def _filter_copy(node: CircleNode, filt: SupportFilter) -> CircleNode:
    kept_children: list[CircleNode] = []
    for child in node.children:
        if child.level == LEVEL_POST and child.labels is not None:
            if not filt.allows("seeking", child.labels):
                continue
        if child.level == LEVEL_COMMENT and child.labels is not None:
            if not filt.allows("providing", child.labels):
                continue
        kept_children.append(_filter_copy(child, filt))
    # Topic circles with no surviving posts are omitted entirely.
    if node.level == LEVEL_ROOT:
        kept_children = [t for t in kept_children if t.children]
    copied = replace(node, children=kept_children)
    if node.level in (LEVEL_ROOT, LEVEL_TOPIC, LEVEL_POST):
        copied.weight = _recount(copied)
    return copied


def _recount(node: CircleNode) -> int:
    if node.level == LEVEL_ROOT:
        return sum(len(t.children) for t in node.children)
    return len(node.children)


def iter_nodes(node: CircleNode, level: str | None = None):
    if level is None or node.level == level:
        yield node
    for child in node.children:
        yield from iter_nodes(child, level)


def histogram(node: CircleNode, view_level: str) -> SupportHistogram:
    """Support distribution of the items visible at a view level.

    Topic and post levels tally the posts in the subtree by sought support;
    the comment level tallies the node's comments by provided support.
    """
    if view_level in (LEVEL_TOPIC, LEVEL_POST):
        direction = "seeking"
        items = list(iter_nodes(node, LEVEL_POST))
    elif view_level == LEVEL_COMMENT:
        direction = "providing"
        items = list(iter_nodes(node, LEVEL_COMMENT))
    else:
        raise ValidationError(f"no histogram for view level {view_level!r}")
    counts = {kind: {level: 0 for level in LEVELS} for kind in KINDS}
    for item in items:
        if item.labels is None:
            continue
        for kind in KINDS:
            counts[kind][item.labels.level_for(kind)] += 1
    return SupportHistogram(direction=direction, counts=counts)


# -- layout ---------------------------------------------------------------


@dataclass
class LayoutCircle:
    node: CircleNode
    x: float
    y: float
    r: float
    children: list["LayoutCircle"] = field(default_factory=list)


def _unit_radius(weight: int) -> float:
    return math.sqrt(max(weight, _W_FLOOR))


def _layout_subtree(node: CircleNode) -> LayoutCircle:
    """Lay out the subtree; result radius is the required enclosure radius
    and child coordinates are relative to the node center."""
    if not node.children:
        return LayoutCircle(node, 0.0, 0.0, _unit_radius(node.weight))
    ordered = sorted(node.children, key=lambda c: (-c.weight, c.ref_id))
    laid = [_layout_subtree(child) for child in ordered]
    scale = max(sub.r / _unit_radius(sub.node.weight) for sub in laid)
    display = [scale * _unit_radius(sub.node.weight) for sub in laid]
    circles, enclosure_r = pack_siblings(display)
    children = [
        LayoutCircle(sub.node, circle.x, circle.y, radius, sub.children)
        for sub, circle, radius in zip(laid, circles, display)
    ]
    return LayoutCircle(node, 0.0, 0.0, enclosure_r, children)


def pack(node: CircleNode) -> LayoutCircle:
    """Pack the hierarchy into [0,1]^2 with the root at (0.5, 0.5, 0.5)."""
    relative = _layout_subtree(node)
    scale = 0.5 / relative.r if relative.r > 0 else 1.0
    return _to_absolute(relative, 0.5, 0.5, scale)


def _to_absolute(rel: LayoutCircle, cx: float, cy: float, scale: float) -> LayoutCircle:
    radius = rel.r * scale if rel.r > 0 else 0.5
    return LayoutCircle(
        rel.node,
        cx,
        cy,
        radius,
        [
            _to_absolute(child, cx + child.x * scale, cy + child.y * scale, scale)
            for child in rel.children
        ],
    )


def renormalize(layout: LayoutCircle) -> LayoutCircle:
    """Re-center a layout subtree so its root is (0.5, 0.5, 0.5)."""
    scale = 0.5 / layout.r if layout.r > 0 else 1.0

    def walk(circle: LayoutCircle) -> LayoutCircle:
        return LayoutCircle(
            circle.node,
            0.5 + (circle.x - layout.x) * scale,
            0.5 + (circle.y - layout.y) * scale,
            circle.r * scale,
            [walk(child) for child in circle.children],
        )

    return walk(layout)


# -- zoom -----------------------------------------------------------------


@dataclass
class ViewState:
    level: str
    path: tuple[str, ...]
    layout: LayoutCircle
    histogram: SupportHistogram
    post_list: list[str]


_PATH_LEVELS = (LEVEL_TOPIC, LEVEL_POST, LEVEL_COMMENT)


def zoom(root: CircleNode, layout: LayoutCircle, path: list[str]) -> ViewState:
    """Resolve a zoom path against the filtered hierarchy and its layout."""
    if len(path) > 2:
        raise ValidationError(f"zoom path too deep: {path!r}")
    node, node_layout = root, layout
    for ref_id in path:
        match = next((c for c in node_layout.children if c.node.ref_id == ref_id), None)
        if match is None:
            raise StaleViewError(
                f"path element {ref_id!r} is not in the current view; refresh"
            )
        node, node_layout = match.node, match
    view_level = _PATH_LEVELS[len(path)]
    posts = sorted(
        iter_nodes(node, LEVEL_POST),
        key=lambda p: (p.rank if p.rank is not None else 0, p.ref_id),
    )
    return ViewState(
        level=view_level,
        path=tuple(path),
        layout=renormalize(node_layout),
        histogram=histogram(node, view_level),
        post_list=[p.ref_id for p in posts],
    )


# -- serialization --------------------------------------------------------

VIEW_SCHEMA_VERSION = 1


def serialize_view(view: ViewState, pairs: PairSet | None = None) -> dict:
    """Serialize a view state into the versioned wire payload."""

    def circle_payload(circle: LayoutCircle, cluster_scope: frozenset[str]) -> dict:
        node = circle.node
        payload: dict = {
            "ref_id": node.ref_id,
            "level": node.level,
            "x": circle.x,
            "y": circle.y,
            "r": circle.r,
            "weight": node.weight,
        }
        if node.title is not None:
            payload["title"] = node.title
        if node.keywords is not None:
            payload["keywords"] = list(node.keywords)
        if node.level == LEVEL_POST:
            similar: set[str] = set()
            if pairs is not None and pairs.knows(node.ref_id):
                similar = pairs.neighbors(node.ref_id, cluster_scope - {node.ref_id})
            payload["similar_ids"] = sorted(similar)
        if node.level == LEVEL_TOPIC:
            cluster_scope = frozenset(c.node.ref_id for c in circle.children)
        payload["children"] = [
            circle_payload(child, cluster_scope) for child in circle.children
        ]
        return payload

    scope = frozenset()
    if view.layout.node.level == LEVEL_TOPIC:
        scope = frozenset(c.node.ref_id for c in view.layout.children)
    return {
        "schema_version": VIEW_SCHEMA_VERSION,
        "level": view.level,
        "path": list(view.path),
        "histogram": {
            "direction": view.histogram.direction,
            "counts": view.histogram.counts,
        },
        "post_list": view.post_list,
        "tree": circle_payload(view.layout, scope),
    }
