"""Funnel (Lee-Preparata) shortest paths through a chain of portals.

The funnel is kept as an immutable value so it can be extended one portal at a
time along many branches of a tree of triangles (each branch copies only the two
short chains; the apex path is a shared linked list).
"""

from __future__ import annotations

from .geometry import Point, dist, orient_sign, simplify_polyline


class _ApexNode:
    __slots__ = ("point", "length", "prev")

    def __init__(self, point, length, prev):
        self.point = point
        self.length = length
        self.prev = prev


def _add(chain: list, other: list, apex: _ApexNode, p, side: int) -> _ApexNode:
    # side=+1 adds to the left chain (turns CCW), side=-1 to the right chain (turns CW)
    while len(chain) >= 2 and orient_sign(chain[-2], chain[-1], p) * side <= 0:
        chain.pop()
    if len(chain) == 1:
        # p sees straight from the apex; if it crosses the other chain the apex advances
        while len(other) >= 2 and orient_sign(other[0], other[1], p) * side < 0:
            apex = _ApexNode(other[1], apex.length + dist(other[0], other[1]), apex)
            del other[0]
        chain[:] = [other[0], p]
    else:
        chain.append(p)
    return apex


class Funnel:
    """Shortest-path funnel from a fixed source through the portals seen so far."""

    __slots__ = ("apex", "left", "right")

    def __init__(self, apex: _ApexNode, left: list, right: list):
        # the chain lists are never mutated after construction
        self.apex = apex
        self.left = left
        self.right = right

    @classmethod
    def start(cls, source) -> "Funnel":
        source = Point(*source)
        return cls(_ApexNode(source, 0.0, None), [source], [source])

    def extend(self, left_point, right_point) -> "Funnel":
        """Pass through the portal ``(left_point, right_point)`` (left as seen moving forward)."""
        left = self.left
        right = self.right
        new_left = len(left) == 1 or left_point != left[-1]
        new_right = len(right) == 1 or right_point != right[-1]
        if not (new_left or new_right):
            return self
        left = list(left)
        right = list(right)
        apex = self.apex
        if new_left:
            apex = _add(left, right, apex, left_point, 1)
        if new_right:
            apex = _add(right, left, apex, right_point, -1)
        return Funnel(apex, left, right)

    def _close(self, target):
        left = self.left[:]
        right = self.right[:]
        apex = _add(left, right, self.apex, target, 1)
        apex = _add(right, left, apex, target, -1)
        return apex, left

    def distance_to(self, target) -> float:
        apex, chain = self._close(target)
        total = apex.length
        for i in range(len(chain) - 1):
            total += dist(chain[i], chain[i + 1])
        return total

    def path_to(self, target) -> tuple:
        apex, chain = self._close(target)
        pts = []
        node = apex
        while node is not None:
            pts.append(node.point)
            node = node.prev
        pts.reverse()
        pts.extend(chain[1:])
        return simplify_polyline(pts)
