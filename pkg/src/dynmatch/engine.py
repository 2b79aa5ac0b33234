"""Fully dynamic maximal matching with constant amortized update time.

The engine reacts to edge insertions and deletions on the leveled oriented
store.  An insertion matches the endpoints when both are free (raising them
to level 0) and otherwise only orients the new edge.  Deleting a matched
edge leaves both endpoints *temporarily free*: unmatched but still at their
old level until settled within the same update.

A temporarily free vertex v settles one of two ways, by out-degree:

* below 3^(level+1): deterministic settle -- scan the out list for a free
  (level -1) neighbor, match it at level 0, or drop v to level -1.
* at least 3^(level+1): randomized settle -- search upward for the lowest
  level L above v's with fewer than 3^(L+1) neighbors strictly below L,
  lift v to L, and match it to a uniform random out-neighbor (whose level
  is then strictly below L, so the expected lifetime of the new matched
  edge pays for the lift).  If the mate's own lift turns out oversized, the
  pair is unmatched again and the mate re-settles recursively one level
  higher, so chain levels strictly increase.

Capped mode bounds all levels by a configured cap: the upward search stops
there, the recursion step is skipped at the cap, and an at-cap pick scans a
fixed-width prefix of the out list and draws uniformly from its sub-cap
members.  Cap-level matched edges can then die only by graph deletions.

Randomized settles consume engine-owned seeded randomness only; update
traces are generated from independent seeds (oblivious adversary).
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass

from .core import POW3, DynGraph, GraphError, InvariantError, consistency_check
from .instrumentation import INDUCED, NATURAL, Metrics

UNCAPPED = "uncapped"
CAPPED = "capped"

DEEP_TRACKING_MAX_N = 10_000


def default_level_cap(t: int) -> int:
    """Level cap for a known trace length: floor(log3(2*sqrt(t)))."""
    if t < 1:
        raise ValueError("trace length must be positive")
    cap = 0
    while POW3[cap + 1] ** 2 <= 4 * t:
        cap += 1
    return cap


def default_cap_sample_width(t: int) -> int:
    """Prefix width for at-cap mate sampling: ceil(3*sqrt(t))."""
    if t < 1:
        raise ValueError("trace length must be positive")
    from math import isqrt

    s = isqrt(9 * t)
    return s if s * s == 9 * t else s + 1


@dataclass(frozen=True)
class EngineConfig:
    mode: str = UNCAPPED
    level_cap: int | None = None
    cap_sample_width: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.mode not in (UNCAPPED, CAPPED):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == CAPPED:
            if self.level_cap is None or self.level_cap < 0:
                raise ValueError("capped mode requires level_cap >= 0")
            if self.cap_sample_width is None or self.cap_sample_width < 1:
                raise ValueError("capped mode requires cap_sample_width >= 1")

    @classmethod
    def capped_for_trace_length(cls, t: int, rng_seed: int = 0) -> "EngineConfig":
        return cls(mode=CAPPED, level_cap=default_level_cap(t),
                   cap_sample_width=default_cap_sample_width(t),
                   rng_seed=rng_seed)


class MatchingEngine:
    """Owns one DynGraph, a seeded RNG, and the instrumentation ledger."""

    def __init__(self, n: int, config: EngineConfig | None = None, *,
                 deep_tracking: bool = False):
        self.config = config or EngineConfig()
        if deep_tracking and n > DEEP_TRACKING_MAX_N:
            raise ValueError(
                f"deep tracking limited to n <= {DEEP_TRACKING_MAX_N} (got {n})")
        self.metrics = Metrics(deep_tracking=deep_tracking)
        self.g = DynGraph(n, metrics=self.metrics)
        self.rng = random.Random(self.config.rng_seed)
        self.cap = self.config.level_cap if self.config.mode == CAPPED else None
        self.matching_size = 0
        self.release: dict[int, int] = {}   # temp-free vertex -> releasing epoch id
        # Settle cascades nest; each nested frame owns a distinct vertex, so
        # depth is bounded by n plus bookkeeping frames.
        limit = 4 * n + 10_000
        if sys.getrecursionlimit() < limit:
            sys.setrecursionlimit(limit)

    # -- public queries ------------------------------------------------------

    def mate(self, v: int) -> int | None:
        m = self.g.mate[v]
        return None if m == -1 else m

    def matched_edges(self) -> list[tuple[int, int]]:
        mate = self.g.mate
        return [(v, mate[v]) for v in range(self.g.n) if mate[v] > v]

    def vertex_cover(self) -> list[int]:
        mate = self.g.mate
        return [v for v in range(self.g.n) if mate[v] != -1]

    def consistency_check(self) -> list[str]:
        return consistency_check(self.g)

    # -- updates ------------------------------------------------------------

    def handle_insert(self, u: int, v: int) -> None:
        g = self.g
        mx = self.metrics
        level = g.level
        if level[u] >= level[v]:
            g.add_arc(u, v)
        else:
            g.add_arc(v, u)
        mx.work += 1
        mx.scope += 1
        if level[u] == -1 and level[v] == -1:
            self._set_matched(u, v)
            g.set_level(u, 0)
            g.set_level(v, 0)
            snap = tuple(g.out[u]) if mx.deep_tracking else None
            mx.on_epoch_created(self._edge(u, v), 0, u, "insert", snap)
        mx.on_update_done()

    def handle_delete(self, u: int, v: int) -> None:
        g = self.g
        mx = self.metrics
        _tail, matched = g.remove_edge(u, v)
        mx.work += 1
        mx.scope += 1
        if mx.deep_tracking:
            mx.deletion_log.append((mx.updates, u, v))
        if matched:
            eid = mx.on_epoch_terminated(self._edge(u, v), NATURAL)
            self._set_unmatched(u, v)
            g.temp_free[u] = 1
            g.temp_free[v] = 1
            self.release[u] = eid
            self.release[v] = eid
            self._evalf(u)
            if g.mate[v] == -1:
                self._evalf(v)
            if self.release:
                raise InvariantError(f"unsettled vertices after delete: {self.release}")
        mx.on_update_done()

    def apply(self, trace) -> None:
        """Replay a workload trace from the current (normally empty) state."""
        ins, dele = self.handle_insert, self.handle_delete
        for op, u, v in trace:
            if op == 0:
                ins(u, v)
            else:
                dele(u, v)

    # -- settling ------------------------------------------------------------

    def handle_free(self, v: int) -> None:
        """Settle a temporarily free vertex; rejected on anything else."""
        if not self.g.temp_free[v] or self.g.mate[v] != -1:
            raise GraphError(f"vertex {v} is not temporarily free")
        self._evalf(v)

    def deterministic_settle(self, v: int) -> None:
        g = self.g
        if not g.temp_free[v] or g.mate[v] != -1:
            raise GraphError(f"vertex {v} is not temporarily free")
        if len(g.out[v]) >= POW3[g.level[v] + 1]:
            raise GraphError(f"vertex {v} has out-degree >= 3^(level+1)")
        self._detr(v)

    def random_settle(self, v: int) -> None:
        g = self.g
        if not g.temp_free[v] or g.mate[v] != -1:
            raise GraphError(f"vertex {v} is not temporarily free")
        if len(g.out[v]) < POW3[g.level[v] + 1]:
            raise GraphError(f"vertex {v} has out-degree < 3^(level+1)")
        self._rand(v, 0, None, None, 1)

    def compute_rising_level(self, v: int) -> int:
        """Lowest admissible level above v's for a randomized settle."""
        g = self.g
        if len(g.out[v]) < POW3[g.level[v] + 1]:
            raise GraphError(f"vertex {v} has out-degree < 3^(level+1)")
        return self._rising_level(v)

    def _evalf(self, v: int) -> None:
        if len(self.g.out[v]) < POW3[self.g.level[v] + 1]:
            self._detr(v)
        else:
            self._rand(v, 0, None, None, 1)

    def _rising_level(self, v: int) -> int:
        g = self.g
        mx = self.metrics
        lv = g.level[v]
        inb_v = g.inb[v]
        phi_next = len(g.out[v])
        if lv >= 0:
            bucket = inb_v.get(lv)
            if bucket:
                phi_next += len(bucket)
        mx.on_work(1)
        lstar = lv
        cap = self.cap
        while phi_next >= POW3[lstar + 1] and (cap is None or lstar < cap):
            lstar += 1
            bucket = inb_v.get(lstar)
            if bucket:
                phi_next += len(bucket)
            mx.on_work(1)
        return lstar

    def _detr(self, v: int) -> None:
        """Match v to a free out-neighbor if any, else drop it to level -1.

        Temporarily free neighbors (unmatched, level above -1) are ignored
        on purpose; they get settled by their own pending calls.
        """
        g = self.g
        mx = self.metrics
        mx.push_scope()
        releasing = self.release.pop(v, None)
        level = g.level
        found = -1
        scanned = 0
        for w in g.out[v]:
            scanned += 1
            if level[w] == -1:
                found = w
                break
        mx.on_scan(scanned)
        if found >= 0:
            self._set_matched(v, found)
            g.set_level(v, 0)
            g.set_level(found, 0)
            snap = tuple(g.out[v]) if mx.deep_tracking else None
            mx.on_epoch_created(self._edge(v, found), 0, v, "settle", snap)
        else:
            g.set_level(v, -1)
            g.temp_free[v] = 0
        mx.charge(releasing, mx.pop_scope())

    def _rand(self, v: int, debt: int, prev_level: int | None,
              parent_eid: int | None, depth: int) -> None:
        """Randomized settle of v via the level-rising search; see module doc."""
        g = self.g
        mx = self.metrics
        cap = self.cap
        mx.note_recursion_depth(depth)
        if depth > g.max_level + 2:
            raise InvariantError(f"settle recursion exceeded {g.max_level + 2} levels")
        mx.push_scope()
        self.release.pop(v, None)
        entry_level = g.level[v]
        lstar = self._rising_level(v)
        if (cap is None or entry_level < cap) and lstar <= entry_level:
            raise InvariantError(f"rising search failed to climb from {entry_level}")
        if prev_level is not None and lstar <= prev_level:
            raise InvariantError(
                f"chain level did not increase: {lstar} after {prev_level}")
        g.set_level(v, lstar)
        out_v = g.out[v]
        dout = len(out_v)
        if dout < POW3[lstar]:
            raise InvariantError(f"post-rise out-degree {dout} < 3^{lstar}")
        at_cap = cap is not None and lstar == cap
        if not at_cap and dout >= POW3[lstar + 1]:
            raise InvariantError(f"post-rise out-degree {dout} >= 3^{lstar + 1}")
        if at_cap:
            width = self.config.cap_sample_width
            prefix = out_v if dout <= width else out_v[:width]
            mx.on_scan(len(prefix))
            level = g.level
            candidates = [w for w in prefix if level[w] < lstar]
            if not candidates:
                raise InvariantError("no sub-cap mate candidate in scanned prefix")
            w = candidates[self.rng.randrange(len(candidates))]
        else:
            w = out_v[self.rng.randrange(dout)]
            mx.on_work(1)
        if g.level[w] >= lstar:
            raise InvariantError(f"picked mate at level {g.level[w]} >= {lstar}")
        snap = tuple(out_v) if mx.deep_tracking else None
        wprime = g.mate[w]
        terminated_mate_eid = None
        if wprime != -1:
            terminated_mate_eid = mx.on_epoch_terminated(self._edge(w, wprime), INDUCED)
            self._set_unmatched(w, wprime)
            g.temp_free[wprime] = 1
            self.release[wprime] = terminated_mate_eid
        mx.push_scope()
        g.set_level(w, lstar)
        w_cost = mx.pop_scope()
        self._set_matched(v, w)
        eid = mx.on_epoch_created(self._edge(v, w), lstar, v, "rise", snap)
        if terminated_mate_eid is not None:
            mx.epochs[terminated_mate_eid].terminated_by = eid
        if parent_eid is not None:
            mx.epochs[parent_eid].terminated_by = eid
        recurse = not at_cap and len(g.out[w]) >= POW3[lstar + 1]
        mx.on_work(1)
        if recurse:
            mx.on_epoch_terminated(self._edge(v, w), INDUCED)
            self._set_unmatched(v, w)
            g.temp_free[v] = 1
            g.temp_free[w] = 1
            self.release[v] = eid
            self.release[w] = eid
        mx.charge(eid, mx.pop_scope() + debt)
        if recurse:
            self._rand(w, w_cost, lstar, eid, depth + 1)
            if g.mate[v] == -1:
                self._evalf(v)
        else:
            mx.charge(eid, w_cost)
        if wprime != -1 and g.mate[wprime] == -1:
            self._evalf(wprime)

    # -- bookkeeping ----------------------------------------------------------

    def _edge(self, u: int, v: int) -> tuple[int, int]:
        return (u, v) if u < v else (v, u)

    def _set_matched(self, a: int, b: int) -> None:
        g = self.g
        g.mate[a] = b
        g.mate[b] = a
        g.temp_free[a] = 0
        g.temp_free[b] = 0
        if self.release:
            self.release.pop(a, None)
            self.release.pop(b, None)
        self.matching_size += 1
        mx = self.metrics
        mx.work += 1
        mx.scope += 1

    def _set_unmatched(self, a: int, b: int) -> None:
        g = self.g
        g.mate[a] = -1
        g.mate[b] = -1
        self.matching_size -= 1
        mx = self.metrics
        mx.work += 1
        mx.scope += 1
