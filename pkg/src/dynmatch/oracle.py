"""Independent reference implementations for differential testing.

Nothing here touches the engine's data structures: the checkers work on a
plain undirected edge set, the exact maximum-matching solver is a bitmask
dynamic program, and the baseline maintainer is the textbook O(n)-per-update
repair (a freed endpoint scans *all* its neighbors for a free vertex).
"""

from __future__ import annotations

import numpy as np

MAX_ORACLE_VERTICES = 22


class PlainGraph:
    """n vertices plus a set of (min, max) vertex pairs."""

    def __init__(self, n: int, edges=()):
        self.n = n
        self.edges: set[tuple[int, int]] = set()
        for u, v in edges:
            self.add(u, v)

    @staticmethod
    def _norm(u: int, v: int) -> tuple[int, int]:
        if u == v:
            raise ValueError(f"self-loop rejected: ({u}, {v})")
        return (u, v) if u < v else (v, u)

    def add(self, u: int, v: int) -> None:
        e = self._norm(u, v)
        if e in self.edges:
            raise ValueError(f"duplicate edge: {e}")
        self.edges.add(e)

    def remove(self, u: int, v: int) -> None:
        self.edges.remove(self._norm(u, v))


def check_maximal(g: PlainGraph, matching) -> bool:
    """True iff ``matching`` is a maximal matching of g.

    Checks membership, vertex-disjointness, and that every graph edge has
    at least one matched endpoint.
    """
    covered: set[int] = set()
    for u, v in matching:
        e = PlainGraph._norm(u, v)
        if e not in g.edges:
            return False
        if u in covered or v in covered:
            return False
        covered.add(u)
        covered.add(v)
    return all(u in covered or v in covered for u, v in g.edges)


def max_matching_size(g: PlainGraph) -> int:
    """Exact maximum matching cardinality by brute force.

    Bitmask subset DP, run per connected component; limited to n <= 22.
    """
    if g.n > MAX_ORACLE_VERTICES:
        raise ValueError(f"brute-force oracle limited to n <= {MAX_ORACLE_VERTICES}")
    adj: dict[int, list[int]] = {}
    for u, v in g.edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    seen: set[int] = set()
    total = 0
    for root in adj:
        if root in seen:
            continue
        comp = [root]
        seen.add(root)
        queue = [root]
        while queue:
            x = queue.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        total += _component_max_matching(comp, adj)
    return total


def _component_max_matching(comp: list[int], adj: dict[int, list[int]]) -> int:
    """Subset DP over one component, vectorized across masks.

    dp[mask] considers the lowest vertex v of mask: either v stays single,
    or it pairs with a neighbor u in mask (u > v holds since v is lowest).
    Masks sharing a lowest bit are processed together as numpy slices.
    """
    k = len(comp)
    index = {x: i for i, x in enumerate(comp)}
    nbr_bits = [0] * k
    for x in comp:
        i = index[x]
        for y in adj[x]:
            nbr_bits[i] |= 1 << index[y]
    dp = np.zeros(1 << k, dtype=np.int8)
    for v in range(k - 1, -1, -1):
        high = np.arange(1 << (k - 1 - v), dtype=np.int32) << (v + 1)
        best = dp[high].copy()
        for u in range(v + 1, k):
            if not (nbr_bits[v] >> u) & 1:
                continue
            ubit = 1 << u
            with_u = (high & ubit).astype(bool)
            cand = dp[high ^ ubit] + 1
            np.maximum(best, cand, where=with_u, out=best)
        dp[high | (1 << v)] = best
    return int(dp[-1])


class NaiveMaintainer:
    """Baseline dynamic maximal matching: greedy repair over full adjacency.

    On a matched-edge deletion each freed endpoint scans all its neighbors
    for a free vertex, so a single update can cost O(n).  ``work`` counts
    one unit per update plus one per neighbor scanned.
    """

    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.mate = [-1] * n
        self.work = 0
        self.scans = 0

    def insert(self, u: int, v: int) -> None:
        self.adj[u].append(v)
        self.adj[v].append(u)
        self.work += 1
        mate = self.mate
        if mate[u] == -1 and mate[v] == -1:
            mate[u] = v
            mate[v] = u

    def delete(self, u: int, v: int) -> None:
        self.adj[u].remove(v)
        self.adj[v].remove(u)
        self.work += 1
        mate = self.mate
        if mate[u] == v:
            mate[u] = -1
            mate[v] = -1
            for z in (u, v):
                if mate[z] == -1:
                    self._repair(z)

    def _repair(self, z: int) -> None:
        mate = self.mate
        scanned = 0
        for w in self.adj[z]:
            scanned += 1
            if mate[w] == -1:
                mate[z] = w
                mate[w] = z
                break
        self.scans += scanned
        self.work += scanned

    def matching(self) -> list[tuple[int, int]]:
        mate = self.mate
        return [(v, mate[v]) for v in range(self.n) if mate[v] > v]

    def apply(self, trace, on_step=None) -> None:
        """Replay a trace; ``on_step(i)`` runs after each update if given."""
        if on_step is None:
            for op, u, v in trace:
                if op == 0:
                    self.insert(u, v)
                else:
                    self.delete(u, v)
        else:
            for i, (op, u, v) in enumerate(trace):
                if op == 0:
                    self.insert(u, v)
                else:
                    self.delete(u, v)
                on_step(i)
