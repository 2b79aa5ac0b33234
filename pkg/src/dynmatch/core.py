"""Leveled, oriented adjacency store for the dynamic matching engine.

Every vertex carries an integer level in [-1, max_level].  Every edge is
stored as a single directed arc pointing from its tail (the endpoint of
weakly higher level) to its head.  For each vertex we keep

* ``out[v]``   -- the tails-eye view: ids of v's outgoing neighbors, in a
  plain array so that append, swap-remove and uniform random sampling are
  all O(1);
* ``inb[v]``   -- incoming neighbors indexed by *their* level: a dict
  mapping level -> array of neighbor ids.  Keys with empty arrays are
  deleted, so the dict holds one entry per populated level only.

A per-edge record stores the tail id and the positions of the two list
occurrences, standing in for mutual pointers.  Swap-removal keeps those
positions valid by patching the record of whichever edge got moved.

The structure knows nothing about the update algorithm; it only offers the
primitives the engine composes: arc insertion/removal, ``set_level`` (which
re-levels a vertex and flips the incident arcs that would otherwise violate
the orientation), the lower-level neighbor count ``phi``, and uniform
sampling from an out list.
"""

from __future__ import annotations

import random

# Exact powers of three; all threshold comparisons are integer-only.
POW3 = [3**i for i in range(41)]


class GraphError(ValueError):
    """Rejected structural operation (duplicate edge, absent edge, bad id)."""


class InvariantError(RuntimeError):
    """An internal runtime invariant failed; the structure must be discarded."""


def max_level_for(n: int) -> int:
    """Largest usable level for an n-vertex graph: floor(log3(n-1)), min 0."""
    level = 0
    while POW3[level + 1] <= n - 1:
        level += 1
    return level


class DynGraph:
    """Leveled oriented graph over n fixed vertices (ids 0..n-1)."""

    __slots__ = ("n", "max_level", "peak_level", "level", "mate", "temp_free",
                 "out", "inb", "edges", "m", "mx")

    def __init__(self, n: int, metrics=None):
        if n < 1:
            raise GraphError("vertex count must be at least 1")
        self.n = n
        self.max_level = max_level_for(n)
        self.peak_level = -1
        self.level = [-1] * n
        self.mate = [-1] * n            # -1 = unmatched
        self.temp_free = bytearray(n)   # set only inside one engine update
        self.out = [[] for _ in range(n)]
        self.inb = [{} for _ in range(n)]
        # edge key -> [tail, pos of head in out[tail], pos of tail in inb[head][level[tail]]]
        self.edges = {}
        self.m = 0
        self.mx = metrics if metrics is not None else _NullMetrics()

    # -- edge keys ---------------------------------------------------------

    def key(self, u: int, v: int) -> int:
        return u * self.n + v if u < v else v * self.n + u

    def has_edge(self, u: int, v: int) -> bool:
        return self.key(u, v) in self.edges

    def _check_pair(self, u: int, v: int) -> None:
        n = self.n
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"vertex id out of range: ({u}, {v})")
        if u == v:
            raise GraphError(f"self-loop rejected: ({u}, {v})")

    # -- low-level list surgery --------------------------------------------

    def _out_remove(self, tail: int, pos: int) -> None:
        lst = self.out[tail]
        moved = lst.pop()
        if pos < len(lst):
            lst[pos] = moved
            self.edges[self.key(tail, moved)][1] = pos

    def _in_remove(self, head: int, lvl: int, pos: int) -> None:
        bucket = self.inb[head][lvl]
        moved = bucket.pop()
        if pos < len(bucket):
            bucket[pos] = moved
            self.edges[self.key(moved, head)][2] = pos
        elif not bucket:
            del self.inb[head][lvl]

    # -- public operations ---------------------------------------------------

    def add_arc(self, tail: int, head: int) -> None:
        """Insert edge {tail, head} oriented tail -> head.

        The caller chooses the tail; the orientation invariant requires
        level(head) <= level(tail).
        """
        self._check_pair(tail, head)
        k = tail * self.n + head if tail < head else head * self.n + tail
        if k in self.edges:
            raise GraphError(f"duplicate edge rejected: ({tail}, {head})")
        out_t = self.out[tail]
        bucket = self.inb[head].setdefault(self.level[tail], [])
        self.edges[k] = [tail, len(out_t), len(bucket)]
        out_t.append(head)
        bucket.append(tail)
        self.m += 1
        mx = self.mx
        mx.work += 2
        mx.scope += 2

    def remove_edge(self, u: int, v: int) -> tuple[int, bool]:
        """Remove edge {u, v}; returns (tail id, was it a matched edge)."""
        self._check_pair(u, v)
        n = self.n
        rec = self.edges.pop(u * n + v if u < v else v * n + u, None)
        if rec is None:
            raise GraphError(f"absent edge rejected: ({u}, {v})")
        tail = rec[0]
        head = v if tail == u else u
        # swap-remove head from out[tail]
        lst = self.out[tail]
        moved = lst.pop()
        pos = rec[1]
        if pos < len(lst):
            lst[pos] = moved
            self.edges[tail * n + moved if tail < moved else moved * n + tail][1] = pos
        # swap-remove tail from inb[head][level[tail]]
        lvl = self.level[tail]
        bucket = self.inb[head][lvl]
        moved = bucket.pop()
        pos = rec[2]
        if pos < len(bucket):
            bucket[pos] = moved
            self.edges[moved * n + head if moved < head else head * n + moved][2] = pos
        elif not bucket:
            del self.inb[head][lvl]
        self.m -= 1
        mx = self.mx
        mx.work += 2
        mx.scope += 2
        return tail, self.mate[u] == v

    def set_level(self, v: int, new: int) -> None:
        """Move v to level ``new``, flipping incident arcs as needed.

        Arcs whose orientation the move would break are reversed: on a drop,
        out-arcs toward levels in [new+1, old] become incoming; on a rise,
        in-arcs from levels in [old, new-1] become outgoing.  Each surviving
        out-neighbor also gets v relocated to its bucket for the new level.
        """
        if not (-1 <= new <= self.max_level):
            raise GraphError(f"level {new} out of range [-1, {self.max_level}]")
        old = self.level[v]
        mx = self.mx
        if new > self.peak_level:
            self.peak_level = new
        if new == old:
            mx.work += 1
            mx.scope += 1
            return
        n, edges, inb, out = self.n, self.edges, self.inb, self.out
        work = 1
        scans = 0
        flips = 0
        # Tell every out-neighbor about the new level: move v between buckets.
        out_v = out[v]
        if out_v:
            for w in out_v:
                rec = edges[v * n + w if v < w else w * n + v]
                self._in_remove(w, old, rec[2])
                bucket = inb[w].setdefault(new, [])
                rec[2] = len(bucket)
                bucket.append(v)
            work += 2 * len(out_v)
            scans += len(out_v)
        level = self.level
        if new < old:
            i = 0
            while i < len(out_v):
                w = out_v[i]
                lw = level[w]
                if new < lw <= old:
                    # flip v->w into w->v
                    rec = edges[v * n + w if v < w else w * n + v]
                    self._out_remove(v, rec[1])
                    self._in_remove(w, new, rec[2])
                    out_w = out[w]
                    bucket = inb[v].setdefault(lw, [])
                    rec[0] = w
                    rec[1] = len(out_w)
                    rec[2] = len(bucket)
                    out_w.append(v)
                    bucket.append(w)
                    flips += 1
                else:
                    i += 1
        else:
            inb_v = inb[v]
            work += new - old   # one probe per candidate bucket
            for lvl in range(old, new):
                bucket = inb_v.pop(lvl, None)
                if bucket is None:
                    continue
                for w in bucket:
                    # flip w->v into v->w
                    rec = edges[v * n + w if v < w else w * n + v]
                    self._out_remove(w, rec[1])
                    target = inb[w].setdefault(new, [])
                    rec[0] = v
                    rec[1] = len(out_v)
                    rec[2] = len(target)
                    out_v.append(w)
                    target.append(v)
                flips += len(bucket)
        level[v] = new
        work += 4 * flips
        scans += flips
        mx.work += work + scans
        mx.scans += scans
        mx.flips += flips
        mx.scope += work + scans

    def phi(self, v: int, upto: int) -> int:
        """Number of neighbors of v with level strictly below ``upto``.

        Only queried for upto >= level(v) + 1, where it equals |out(v)| plus
        the sizes of the incoming buckets at levels level(v) .. upto-1 (all
        out-neighbors sit weakly below level(v), all incoming weakly above).
        """
        lv = self.level[v]
        if upto < lv + 1:
            raise GraphError(f"phi query below domain: {upto} < level+1")
        total = len(self.out[v])
        inb_v = self.inb[v]
        for lvl in range(max(lv, 0), upto):
            bucket = inb_v.get(lvl)
            if bucket is not None:
                total += len(bucket)
        return total

    def random_out_neighbor(self, v: int, rng: random.Random) -> int:
        """Uniform pick from out(v); O(1) by array indexing."""
        out_v = self.out[v]
        if not out_v:
            raise GraphError(f"vertex {v} has no outgoing neighbors")
        return out_v[rng.randrange(len(out_v))]

    # -- verification ---------------------------------------------------------

    def stored_elements(self) -> int:
        """Total list occurrences across out lists and incoming buckets."""
        total = sum(len(lst) for lst in self.out)
        for buckets in self.inb:
            for bucket in buckets.values():
                total += len(bucket)
        return total

    def bucket_count(self) -> int:
        return sum(len(buckets) for buckets in self.inb)


def consistency_check(g: DynGraph) -> list[str]:
    """Full structural audit; returns a list of violations (empty = clean).

    Checks, for the quiescent state between updates: level ranges, mate
    symmetry and equal matched levels, free-vertex normal form (unmatched =>
    level -1 and out-degree 0), orientation (head level <= tail level),
    bucket key range and non-emptiness, position cross-references, the
    2m space identity, and maximality (no edge joins two unmatched vertices).
    """
    bad: list[str] = []
    n = g.n
    level, mate, out, inb = g.level, g.mate, g.out, g.inb
    for v in range(n):
        lv = level[v]
        if not (-1 <= lv <= g.max_level):
            bad.append(f"level out of range: vertex {v} at {lv}")
        if g.temp_free[v]:
            bad.append(f"vertex {v} left temporarily free between updates")
        w = mate[v]
        if w == -1:
            if not g.temp_free[v]:
                if lv != -1:
                    bad.append(f"free vertex {v} at level {lv} != -1")
                if out[v]:
                    bad.append(f"free vertex {v} has out-degree {len(out[v])}")
        else:
            if mate[w] != v:
                bad.append(f"mate asymmetry: {v} -> {w} -> {mate[w]}")
            if lv < 0:
                bad.append(f"matched vertex {v} at level {lv} < 0")
            if level[w] != lv:
                bad.append(f"matched edge ({v},{w}) spans levels {lv}/{level[w]}")
            if not g.has_edge(v, w):
                bad.append(f"matched edge ({v},{w}) absent from graph")
        for lvl, bucket in inb[v].items():
            if lvl < max(lv, 0):
                bad.append(f"bucket key {lvl} below max(level,0) at vertex {v}")
            if not bucket:
                bad.append(f"empty bucket {lvl} retained at vertex {v}")
    if len(g.edges) != g.m:
        bad.append(f"edge count mismatch: dict {len(g.edges)} vs m {g.m}")
    for k, rec in g.edges.items():
        u, v = divmod(k, n)
        tail = rec[0]
        head = v if tail == u else u
        if tail not in (u, v):
            bad.append(f"edge ({u},{v}) records foreign tail {tail}")
            continue
        if level[head] > level[tail]:
            bad.append(f"orientation violated on ({tail}->{head}): "
                       f"{level[tail]} < {level[head]}")
        ot = out[tail]
        if rec[1] >= len(ot) or ot[rec[1]] != head:
            bad.append(f"stale out position for edge ({u},{v})")
        bucket = inb[head].get(level[tail])
        if bucket is None or rec[2] >= len(bucket) or bucket[rec[2]] != tail:
            bad.append(f"stale incoming position for edge ({u},{v})")
        if mate[u] == -1 and mate[v] == -1:
            bad.append(f"maximality violated: edge ({u},{v}) joins two free vertices")
    if g.stored_elements() != 2 * g.m:
        bad.append(f"space identity violated: {g.stored_elements()} != 2*{g.m}")
    return bad


class _NullMetrics:
    """Counter sink used when no instrumentation is attached."""

    __slots__ = ("work", "scans", "flips", "scope")

    def __init__(self):
        self.work = 0
        self.scans = 0
        self.flips = 0
        self.scope = 0

    def on_work(self, k: int = 1) -> None:
        pass

    def on_scan(self, k: int = 1) -> None:
        pass

    def on_flip(self, k: int = 1) -> None:
        pass
