"""Named graphs so the worked examples run without hand-written files."""

from __future__ import annotations

import re

from .core import Graph
from .errors import DataError


def cycle(n: int) -> Graph:
    if n < 3:
        raise DataError("cycle needs at least 3 vertices")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Graph:
    if n < 2:
        raise DataError("path needs at least 2 vertices")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def star(k: int) -> Graph:
    """Star with k leaves on k+1 vertices, center 0."""
    if k < 1:
        raise DataError("star needs at least 1 leaf")
    return Graph(k + 1, tuple((0, i) for i in range(1, k + 1)))


def complete(n: int) -> Graph:
    if n < 2:
        raise DataError("complete graph needs at least 2 vertices")
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise DataError("complete bipartite sides must be nonempty")
    return Graph(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, tuple(outer + spokes + inner))


def g52() -> Graph:
    """5-cycle plus the chords (v1,v3) and (v1,v4); edges e1..e5 then chords."""
    return Graph(5, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (0, 3)))


def g63() -> Graph:
    """6-cycle plus the chords (v1,v5), (v2,v4), (v3,v6)."""
    return Graph(6, ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0),
                     (0, 4), (1, 3), (2, 5)))


_PATTERNS = (
    (re.compile(r"^c(?:ycle)?(\d+)$"), lambda m: cycle(int(m.group(1)))),
    (re.compile(r"^path(\d+)$"), lambda m: path(int(m.group(1)))),
    (re.compile(r"^star(\d+)$"), lambda m: star(int(m.group(1)))),
    (re.compile(r"^complete(\d+)$"), lambda m: complete(int(m.group(1)))),
    (re.compile(r"^complete_bipartite(\d+),(\d+)$"),
     lambda m: complete_bipartite(int(m.group(1)), int(m.group(2)))),
    (re.compile(r"^g52$"), lambda m: g52()),
    (re.compile(r"^g63$"), lambda m: g63()),
    (re.compile(r"^petersen$"), lambda m: petersen()),
)


def builtin_graph(name: str) -> Graph:
    """Resolve names like c6, path4, star3, complete5, complete_bipartite2,3."""
    key = name.strip().lower()
    for pattern, build in _PATTERNS:
        m = pattern.match(key)
        if m:
            return build(m)
    raise DataError(f"unknown builtin graph {name!r}")
