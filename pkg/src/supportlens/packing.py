"""Deterministic circle packing for the zoomable hierarchy view.

Siblings are packed with a front-chain algorithm: the first circles are
placed mutually tangent, then each next circle is placed tangent to a pair
on the moving front; intersections with the chain cut it back and retry.
The packed group is wrapped in its smallest enclosing circle (move-to-front
Welzl over circles, with a seeded shuffle so results are reproducible).

All inputs are (radius, key) pairs; callers are responsible for ordering.
Coordinates are in the same units as the radii.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

_EPS = 1e-6
_SHUFFLE_SEED = 0x5EED


@dataclass
class Circle:
    x: float
    y: float
    r: float


class _ChainNode:
    __slots__ = ("circle", "prev", "next")

    def __init__(self, circle: Circle):
        self.circle = circle
        self.prev: "_ChainNode" = self
        self.next: "_ChainNode" = self


def _place(b: Circle, a: Circle, c: Circle) -> None:
    """Position c tangent to both a and b, on the outside of the front."""
    dx = b.x - a.x
    dy = b.y - a.y
    d2 = dx * dx + dy * dy
    if d2:
        a2 = (a.r + c.r) ** 2
        b2 = (b.r + c.r) ** 2
        if a2 > b2:
            x = (d2 + b2 - a2) / (2 * d2)
            y = math.sqrt(max(0.0, b2 / d2 - x * x))
            c.x = b.x - x * dx - y * dy
            c.y = b.y - x * dy + y * dx
        else:
            x = (d2 + a2 - b2) / (2 * d2)
            y = math.sqrt(max(0.0, a2 / d2 - x * x))
            c.x = a.x + x * dx - y * dy
            c.y = a.y + x * dy + y * dx
    else:
        c.x = a.x + c.r
        c.y = a.y


def _intersects(a: Circle, b: Circle) -> bool:
    dr = a.r + b.r - _EPS
    dx = b.x - a.x
    dy = b.y - a.y
    return dr > 0 and dr * dr > dx * dx + dy * dy


def _front_score(node: _ChainNode) -> float:
    # Distance from origin of the weighted midpoint of the chain edge.
    a = node.circle
    b = node.next.circle
    ab = a.r + b.r
    dx = (a.x * b.r + b.x * a.r) / ab
    dy = (a.y * b.r + b.y * a.r) / ab
    return dx * dx + dy * dy


def pack_siblings(radii: list[float]) -> tuple[list[Circle], float]:
    """Pack circles of the given radii without overlaps.

    Returns the circles (centered on their common enclosure) and the radius
    of the smallest enclosing circle.
    """
    circles = [Circle(0.0, 0.0, r) for r in radii]
    n = len(circles)
    if n == 0:
        return circles, 0.0
    a = circles[0]
    a.x, a.y = 0.0, 0.0
    if n == 1:
        return circles, a.r
    b = circles[1]
    a.x = -b.r
    b.x = a.r
    b.y = 0.0
    if n == 2:
        enclosure = enclose(circles)
        for circle in circles:
            circle.x -= enclosure.x
            circle.y -= enclosure.y
        return circles, enclosure.r
    c = circles[2]
    _place(b, a, c)

    na = _ChainNode(a)
    nb = _ChainNode(b)
    nc = _ChainNode(c)
    na.next = nc.prev = nb
    nb.next = na.prev = nc
    nc.next = nb.prev = na
    a_node, b_node = na, nb

    i = 3
    while i < n:
        c = circles[i]
        _place(a_node.circle, b_node.circle, c)

        # Walk the chain both ways from the insertion point; on collision,
        # cut the chain back to the colliding circle and retry this circle.
        j = b_node.next
        k = a_node.prev
        sj = b_node.circle.r
        sk = a_node.circle.r
        collided = False
        while True:
            if sj <= sk:
                if _intersects(j.circle, c):
                    b_node = j
                    a_node.next = b_node
                    b_node.prev = a_node
                    collided = True
                    break
                sj += j.circle.r
                j = j.next
            else:
                if _intersects(k.circle, c):
                    a_node = k
                    a_node.next = b_node
                    b_node.prev = a_node
                    collided = True
                    break
                sk += k.circle.r
                k = k.prev
            if j is k.next:
                break
        if collided:
            continue

        nc = _ChainNode(c)
        nc.prev = a_node
        nc.next = b_node
        a_node.next = b_node.prev = nc
        b_node = nc

        # Restart the front from the chain edge closest to the origin.
        best = a_node
        best_score = _front_score(a_node)
        cursor = a_node.next
        while cursor is not b_node:
            score = _front_score(cursor)
            if score < best_score:
                best, best_score = cursor, score
            cursor = cursor.next
        a_node = best
        b_node = a_node.next
        i += 1

    enclosure = enclose(circles)
    for circle in circles:
        circle.x -= enclosure.x
        circle.y -= enclosure.y
    return circles, enclosure.r


# -- smallest enclosing circle of circles ---------------------------------


def _encloses_not(a: Circle, b: Circle) -> bool:
    dr = a.r - b.r
    dx = b.x - a.x
    dy = b.y - a.y
    return dr < 0 or dr * dr < dx * dx + dy * dy


def _encloses_weak(a: Circle, b: Circle) -> bool:
    dr = a.r - b.r + max(a.r, b.r, 1.0) * 1e-9
    dx = b.x - a.x
    dy = b.y - a.y
    return dr > 0 and dr * dr > dx * dx + dy * dy


def _encloses_weak_all(a: Circle, group: list[Circle]) -> bool:
    return all(_encloses_weak(a, b) for b in group)


def _basis1(a: Circle) -> Circle:
    return Circle(a.x, a.y, a.r)


def _basis2(a: Circle, b: Circle) -> Circle:
    dx = b.x - a.x
    dy = b.y - a.y
    dr = b.r - a.r
    length = math.sqrt(dx * dx + dy * dy)
    return Circle(
        (a.x + b.x + dx / length * dr) / 2,
        (a.y + b.y + dy / length * dr) / 2,
        (length + a.r + b.r) / 2,
    )


def _basis3(a: Circle, b: Circle, c: Circle) -> Circle:
    # Solve (x-xi)^2 + (y-yi)^2 = (r-ri)^2 for the three basis circles:
    # subtracting pairs gives x and y linear in r, leaving one quadratic.
    x1, y1, r1 = a.x, a.y, a.r
    a2, a3 = x1 - b.x, x1 - c.x
    b2, b3 = y1 - b.y, y1 - c.y
    c2, c3 = b.r - r1, c.r - r1
    d1 = x1 * x1 + y1 * y1 - r1 * r1
    d2 = d1 - b.x * b.x - b.y * b.y + b.r * b.r
    d3 = d1 - c.x * c.x - c.y * c.y + c.r * c.r
    ab = a3 * b2 - a2 * b3
    xa = (b2 * d3 - b3 * d2) / (ab * 2) - x1
    xb = (b3 * c2 - b2 * c3) / ab
    ya = (a3 * d2 - a2 * d3) / (ab * 2) - y1
    yb = (a2 * c3 - a3 * c2) / ab
    qa = xb * xb + yb * yb - 1
    qb = 2 * (r1 + xa * xb + ya * yb)
    qc = xa * xa + ya * ya - r1 * r1
    if abs(qa) > 1e-6:
        r = -(qb + math.sqrt(qb * qb - 4 * qa * qc)) / (2 * qa)
    else:
        r = -qc / qb
    return Circle(x1 + xa + xb * r, y1 + ya + yb * r, r)


def _extend_basis(basis: list[Circle], p: Circle) -> list[Circle]:
    if _encloses_weak_all(p, basis):
        return [p]
    for member in basis:
        if _encloses_not(p, member) and _encloses_weak_all(_basis2(member, p), basis):
            return [member, p]
    for i in range(len(basis) - 1):
        for j in range(i + 1, len(basis)):
            bi, bj = basis[i], basis[j]
            if (
                _encloses_not(_basis2(bi, bj), p)
                and _encloses_not(_basis2(bi, p), bj)
                and _encloses_not(_basis2(bj, p), bi)
                and _encloses_weak_all(_basis3(bi, bj, p), basis)
            ):
                return [bi, bj, p]
    raise RuntimeError("enclosing-circle basis extension failed")


def _enclose_basis(basis: list[Circle]) -> Circle:
    if len(basis) == 1:
        return _basis1(basis[0])
    if len(basis) == 2:
        return _basis2(basis[0], basis[1])
    return _basis3(basis[0], basis[1], basis[2])


def enclose(circles: list[Circle]) -> Circle:
    """Smallest circle containing every given circle."""
    if not circles:
        return Circle(0.0, 0.0, 0.0)
    ordered = list(circles)
    random.Random(_SHUFFLE_SEED).shuffle(ordered)
    basis: list[Circle] = []
    enclosure: Circle | None = None
    i = 0
    while i < len(ordered):
        p = ordered[i]
        if enclosure is not None and _encloses_weak(enclosure, p):
            i += 1
        else:
            basis = _extend_basis(basis, p)
            enclosure = _enclose_basis(basis)
            i = 0
    assert enclosure is not None
    return enclosure
