"""Metric trees and spiders (k segments glued at a common center).

Tree points live on edges as (edge index, offset); offsets at 0 or the
edge length are snapped to a canonical per-vertex representation so that
equality tests and direction dispatch are well defined.  All angles
between distinct germs are pi, which is what makes these spaces the
sharpest test cases for the direction machinery.
"""
from __future__ import annotations

import math
from typing import Sequence

from ..errors import GeometryError
from .base import Space


class TreeSpace(Space):
    kind = "tree"

    def __init__(
        self,
        vertices: Sequence[str],
        edges: Sequence[tuple[str, str, float]],
        tolerance: float = 1e-9,
    ):
        super().__init__(tolerance)
        self.vertex_names = [str(v) for v in vertices]
        index = {name: i for i, name in enumerate(self.vertex_names)}
        if len(index) != len(self.vertex_names):
            raise GeometryError("duplicate vertex names")
        self.edges: list[tuple[int, int, float]] = []
        for u, v, length in edges:
            if u not in index or v not in index:
                raise GeometryError(f"edge endpoint {u!r}/{v!r} not declared")
            if float(length) <= 0 or not math.isfinite(float(length)):
                raise GeometryError("edge lengths must be positive and finite")
            if u == v:
                raise GeometryError("self-loop edge")
            self.edges.append((index[u], index[v], float(length)))
        n = len(self.vertex_names)
        if len(self.edges) != n - 1:
            raise GeometryError("a tree on n vertices has exactly n-1 edges")
        self._adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (edge, other)
        for ei, (u, v, _) in enumerate(self.edges):
            self._adj[u].append((ei, v))
            self._adj[v].append((ei, u))
        self._build_paths()
        # interior edge points always carry two germs, so the direction
        # count never drops below 2
        self.max_degree = max(2, max(len(a) for a in self._adj))
        # canonical vertex representative: smallest incident edge index
        self._vertex_rep: list[tuple[int, float]] = []
        for w in range(n):
            if not self._adj[w]:
                raise GeometryError("isolated vertex: tree must be connected")
            ei = min(e for e, _ in self._adj[w])
            u, v, length = self.edges[ei]
            self._vertex_rep.append((ei, 0.0 if u == w else length))

    def _build_paths(self) -> None:
        n = len(self.vertex_names)
        parent = [-1] * n
        parent_edge = [-1] * n
        depth = [0] * n
        dist = [0.0] * n
        order = [0]
        seen = [False] * n
        seen[0] = True
        i = 0
        while i < len(order):
            w = order[i]
            i += 1
            for ei, other in self._adj[w]:
                if not seen[other]:
                    seen[other] = True
                    parent[other] = w
                    parent_edge[other] = ei
                    depth[other] = depth[w] + 1
                    dist[other] = dist[w] + self.edges[ei][2]
                    order.append(other)
        if not all(seen):
            raise GeometryError("tree must be connected")
        self._parent, self._parent_edge = parent, parent_edge
        self._depth, self._root_dist = depth, dist

    def describe(self) -> str:
        return f"tree:{len(self.vertex_names)}v"

    # -- vertex-level helpers ------------------------------------------------

    def _lca(self, a: int, b: int) -> int:
        while self._depth[a] > self._depth[b]:
            a = self._parent[a]
        while self._depth[b] > self._depth[a]:
            b = self._parent[b]
        while a != b:
            a, b = self._parent[a], self._parent[b]
        return a

    def vertex_distance(self, a: int, b: int) -> float:
        c = self._lca(a, b)
        return self._root_dist[a] + self._root_dist[b] - 2.0 * self._root_dist[c]

    def vertex_path(self, a: int, b: int) -> list[int]:
        c = self._lca(a, b)
        up = []
        w = a
        while w != c:
            up.append(w)
            w = self._parent[w]
        down = []
        w = b
        while w != c:
            down.append(w)
            w = self._parent[w]
        return up + [c] + list(reversed(down))

    def vertex_point(self, w: int):
        ei, off = self._vertex_rep[w]
        return self.point((ei, off))

    # -- payload interface -----------------------------------------------------

    def _check(self, data: tuple) -> None:
        if len(data) != 2:
            raise GeometryError("tree points are (edge index, offset)")
        ei, off = int(data[0]), float(data[1])
        if not 0 <= ei < len(self.edges):
            raise GeometryError(f"edge index {ei} out of range")
        if not -self.tolerance <= off <= self.edges[ei][2] + self.tolerance:
            raise GeometryError(f"offset {off} outside edge of length {self.edges[ei][2]}")

    def _canonical(self, data: tuple) -> tuple:
        ei, off = int(data[0]), float(data[1])
        u, v, length = self.edges[ei]
        if off <= self.tolerance:
            return self._vertex_rep[u]
        if off >= length - self.tolerance:
            return self._vertex_rep[v]
        return (ei, off)

    def _vertex_of(self, data: tuple) -> int | None:
        ei, off = data
        u, v, length = self.edges[ei]
        if off <= self.tolerance:
            return u
        if off >= length - self.tolerance:
            return v
        return None

    def _dist(self, a: tuple, b: tuple) -> float:
        if a[0] == b[0]:
            return abs(a[1] - b[1])
        (e1, o1), (e2, o2) = a, b
        u1, v1, L1 = self.edges[e1]
        u2, v2, L2 = self.edges[e2]
        best = math.inf
        for w1, d1 in ((u1, o1), (v1, L1 - o1)):
            for w2, d2 in ((u2, o2), (v2, L2 - o2)):
                best = min(best, d1 + self.vertex_distance(w1, w2) + d2)
        return best

    def _walk(self, a: tuple, b: tuple, arc: float) -> tuple:
        """Point at arclength `arc` along the geodesic from a to b."""
        if a[0] == b[0]:
            step = arc if b[1] >= a[1] else -arc
            return (a[0], a[1] + step)
        (e1, o1), (e2, o2) = a, b
        u1, v1, L1 = self.edges[e1]
        u2, v2, L2 = self.edges[e2]
        best = None
        for w1, d1 in ((u1, o1), (v1, L1 - o1)):
            for w2, d2 in ((u2, o2), (v2, L2 - o2)):
                tot = d1 + self.vertex_distance(w1, w2) + d2
                if best is None or tot < best[0]:
                    best = (tot, w1, w2, d1, d2)
        _, w1, w2, d1, d2 = best
        if arc <= d1 and d1 > 0:
            frac = arc / d1
            target = 0.0 if w1 == u1 else L1
            return (e1, o1 + frac * (target - o1))
        arc -= d1
        path = self.vertex_path(w1, w2)
        for i in range(len(path) - 1):
            x, y = path[i], path[i + 1]
            ei = self._edge_between(x, y)
            u, v, length = self.edges[ei]
            if arc <= length:
                if x == u:
                    return (ei, arc)
                return (ei, length - arc)
            arc -= length
        target = 0.0 if w2 == u2 else L2
        frac = min(1.0, arc / d2) if d2 > 0 else 1.0
        return (e2, target + frac * (o2 - target))

    def _edge_between(self, a: int, b: int) -> int:
        for ei, other in self._adj[a]:
            if other == b:
                return ei
        raise GeometryError("no edge between adjacent path vertices")

    def _geodesic(self, a: tuple, b: tuple, s: float) -> tuple:
        return self._walk(a, b, s * self._dist(a, b))

    def _log(self, a: tuple, b: tuple) -> tuple[tuple, float]:
        d = self._dist(a, b)
        w = self._vertex_of(a)
        if w is None:
            # interior of an edge: probe a step small enough to stay on it
            length = self.edges[a[0]][2]
            arc = 0.5 * min(d, a[1], length - a[1])
            probe = self._walk(a, b, arc)
            sign = 1 if probe[1] > a[1] else -1
            return (a[0], sign), d
        # at a vertex: germ is the first edge of the path
        step = self._walk(a, b, min(d, self._min_incident_len(w)) * 0.5)
        ei = step[0]
        u, v, _ = self.edges[ei]
        sign = 1 if u == w else -1
        return (ei, sign), d

    def _min_incident_len(self, w: int) -> float:
        return min(self.edges[e][2] for e, _ in self._adj[w])

    def _angle(self, base: tuple, d1: tuple, d2: tuple) -> float:
        return 0.0 if d1 == d2 else math.pi

    def directions_at(self, data: tuple) -> list[tuple]:
        w = self._vertex_of(data)
        if w is None:
            return [(data[0], 1), (data[0], -1)]
        germs = []
        for ei, _ in sorted(self._adj[w]):
            u, v, _ = self.edges[ei]
            germs.append((ei, 1 if u == w else -1))
        return germs

    def total_length(self) -> float:
        return math.fsum(length for _, _, length in self.edges)

    def leaf_vertices(self) -> list[int]:
        return [w for w in range(len(self.vertex_names)) if len(self._adj[w]) == 1]

    def _random_point(self, rng, scale: float = 1.0) -> tuple:
        weights = [length for _, _, length in self.edges]
        total = math.fsum(weights)
        r = float(rng.uniform(0.0, total))
        for ei, w in enumerate(weights):
            if r <= w or ei == len(weights) - 1:
                return (ei, min(max(r, 0.0), w))
            r -= w
        raise AssertionError("unreachable")

    def _to_json(self) -> dict:
        return {
            "kind": self.kind,
            "vertices": list(self.vertex_names),
            "edges": [
                [self.vertex_names[u], self.vertex_names[v], length]
                for u, v, length in self.edges
            ],
            "tolerance": self.tolerance,
        }

    def _point_json(self, data: tuple) -> list:
        return [int(data[0]), float(data[1])]

    def _point_from_json(self, obj: list) -> tuple:
        return (int(obj[0]), float(obj[1]))


class SpiderSpace(Space):
    """k segments of given lengths glued at a common center point."""

    kind = "spider"

    def __init__(self, k: int, leg_lengths: Sequence[float] | float = 1.0,
                 tolerance: float = 1e-9):
        super().__init__(tolerance)
        if k < 2:
            raise GeometryError("a spider needs k >= 2 legs")
        self.k = int(k)
        if isinstance(leg_lengths, (int, float)):
            lengths = [float(leg_lengths)] * self.k
        else:
            lengths = [float(x) for x in leg_lengths]
        if len(lengths) != self.k or any(x <= 0 for x in lengths):
            raise GeometryError("need one positive length per leg")
        self.leg_lengths = tuple(lengths)

    def describe(self) -> str:
        return f"spider:{self.k}"

    def _check(self, data: tuple) -> None:
        if len(data) != 2:
            raise GeometryError("spider points are (leg, radius)")
        leg, r = int(data[0]), float(data[1])
        if leg == 0:
            if abs(r) > self.tolerance:
                raise GeometryError("center representation is (0, 0.0)")
            return
        if not 1 <= leg <= self.k:
            raise GeometryError(f"leg {leg} out of range 1..{self.k}")
        if not -self.tolerance <= r <= self.leg_lengths[leg - 1] + self.tolerance:
            raise GeometryError(f"radius {r} outside leg of length {self.leg_lengths[leg - 1]}")

    def _canonical(self, data: tuple) -> tuple:
        leg, r = int(data[0]), float(data[1])
        if leg == 0 or r <= self.tolerance:
            return (0, 0.0)
        return (leg, min(r, self.leg_lengths[leg - 1]))

    def center(self):
        return self.point((0, 0.0))

    def _dist(self, a: tuple, b: tuple) -> float:
        if a[0] == b[0]:
            return abs(a[1] - b[1])
        if a[0] == 0:
            return b[1]
        if b[0] == 0:
            return a[1]
        return a[1] + b[1]

    def _geodesic(self, a: tuple, b: tuple, s: float) -> tuple:
        if a[0] == b[0]:
            return (a[0], a[1] + (b[1] - a[1]) * s)
        arc = s * self._dist(a, b)
        if b[0] == 0:
            return (a[0], a[1] - arc)
        if a[0] == 0:
            return (b[0], arc)
        if arc <= a[1]:
            return (a[0], a[1] - arc)
        return (b[0], arc - a[1])

    def _log(self, a: tuple, b: tuple) -> tuple[tuple, float]:
        d = self._dist(a, b)
        if a[0] == 0:
            return (b[0], 1), d
        if a[0] == b[0] and b[1] > a[1]:
            return (a[0], 1), d
        return (a[0], -1), d

    def _angle(self, base: tuple, d1: tuple, d2: tuple) -> float:
        return 0.0 if d1 == d2 else math.pi

    def directions_at(self, data: tuple) -> list[tuple]:
        if data[0] == 0:
            return [(leg, 1) for leg in range(1, self.k + 1)]
        return [(data[0], 1), (data[0], -1)]

    def total_length(self) -> float:
        return math.fsum(self.leg_lengths)

    @property
    def max_degree(self) -> int:
        return self.k

    def _random_point(self, rng, scale: float = 1.0) -> tuple:
        total = self.total_length()
        r = float(rng.uniform(0.0, total))
        for leg in range(1, self.k + 1):
            if r <= self.leg_lengths[leg - 1] or leg == self.k:
                return (leg, min(r, self.leg_lengths[leg - 1]))
            r -= self.leg_lengths[leg - 1]
        raise AssertionError("unreachable")

    def _to_json(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "leg_lengths": list(self.leg_lengths),
            "tolerance": self.tolerance,
        }

    def _point_json(self, data: tuple) -> list:
        return [int(data[0]), float(data[1])]

    def _point_from_json(self, obj: list) -> tuple:
        return (int(obj[0]), float(obj[1]))


def load_tree_file(text: str, tolerance: float = 1e-9) -> TreeSpace:
    """Parse the plain-text tree grammar: `vertex NAME` and `edge U V LENGTH`.

    Lines starting with '#' and blank lines are ignored.  Vertices first
    appearing inside an edge line are registered implicitly.
    """
    vertices: list[str] = []
    seen: set[str] = set()
    edges: list[tuple[str, str, float]] = []

    def add_vertex(name: str) -> None:
        if name not in seen:
            seen.add(name)
            vertices.append(name)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            add_vertex(parts[1])
        elif parts[0] == "edge" and len(parts) == 4:
            u, v, length = parts[1], parts[2], float(parts[3])
            add_vertex(u)
            add_vertex(v)
            edges.append((u, v, length))
        else:
            raise GeometryError(f"line {lineno}: cannot parse {line!r}")
    return TreeSpace(vertices, edges, tolerance=tolerance)
