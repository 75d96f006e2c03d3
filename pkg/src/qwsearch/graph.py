"""Graph construction and matrix representations for spatial search."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

Edge = tuple[int, int]


def _canonical_edges(edges) -> tuple[Edge, ...]:
    return tuple(sorted((min(i, j), max(i, j)) for i, j in edges))


@dataclass(frozen=True)
class Graph:
    """Undirected connected graph with a marked target node.

    Node indices are 0-based. Edges are stored sorted, so the link
    enumeration seen by the noise model is stable and reproducible.
    """

    n: int
    edges: tuple[Edge, ...]
    target: int = 0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("graph needs at least 2 nodes")
        if not (0 <= self.target < self.n):
            raise ValueError(f"target {self.target} outside [0, {self.n})")
        canon = _canonical_edges(self.edges)
        for i, j in canon:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i}, {j}) outside [0, {self.n})")
        if len(set(canon)) != len(canon):
            raise ValueError("duplicate edges")
        object.__setattr__(self, "edges", canon)
        if not _connected(self.n, canon):
            raise ValueError("graph is not connected")

    @property
    def num_links(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def with_target(self, target: int) -> "Graph":
        return Graph(self.n, self.edges, target)


def _connected(n: int, edges: tuple[Edge, ...]) -> bool:
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return bool(seen.all())


def complete_graph(n: int, target: int = 0) -> Graph:
    """All-to-all graph on ``n`` nodes; by symmetry the target choice is moot."""
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    edges = tuple((i, j) for i in range(n) for j in range(i + 1, n))
    return Graph(n, edges, target)


def star_graph(n: int, target_kind: str = "central") -> Graph:
    """Star on ``n`` nodes: node 0 is the hub, nodes 1..n-1 hang off it.

    ``target_kind`` picks the marked node: ``"central"`` marks the hub,
    ``"external"`` marks node 1 (all leaves are equivalent by symmetry).
    """
    if n < 3:
        raise ValueError("star graph needs n >= 3")
    if target_kind not in ("central", "external"):
        raise ValueError(f"unknown target_kind {target_kind!r}")
    edges = tuple((0, j) for j in range(1, n))
    return Graph(n, edges, 0 if target_kind == "central" else 1)


def adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for i, j in g.edges:
        a[i, j] = 1
        a[j, i] = 1
    return a


def degree_matrix(g: Graph) -> np.ndarray:
    return np.diag(g.degrees())


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian D - A, returned as float64.

    Built in integer arithmetic, so row/column sums are exactly zero.
    """
    lap = degree_matrix(g) - adjacency_matrix(g)
    return lap.astype(np.float64)


def load_edge_list(path: str | Path) -> Graph:
    """Read a graph from text: first line ``n target``, then ``i j`` per edge."""
    lines = [
        ln.strip()
        for ln in Path(path).read_text().splitlines()
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise ValueError(f"{path}: empty edge-list file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}: first line must be 'n target'")
    n, target = int(head[0]), int(head[1])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph(n, tuple(edges), target)


def write_edge_list(g: Graph, path: str | Path) -> None:
    lines = [f"{g.n} {g.target}"]
    lines.extend(f"{i} {j}" for i, j in g.edges)
    Path(path).write_text("\n".join(lines) + "\n")
