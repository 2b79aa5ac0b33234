"""Trace generation, trace file codec, and the teardown transform.

A trace is an ordered list of edge insertions/deletions over n fixed
vertices, valid when replayed from the empty graph (inserts of absent
edges, deletes of present ones).  Generators draw from their own seeded
RNG, never from the engine's, so traces are oblivious to the matching
algorithm's coin flips.

File format: first line ``n=<int> t=<int>``, then t lines of
``+ <u> <v>`` or ``- <u> <v>`` with 0-based ids and single spaces.
"""

from __future__ import annotations

import random
from array import array
from math import isqrt

INSERT = 0
DELETE = 1


class TraceError(ValueError):
    """Malformed or invalid trace data."""


class Trace:
    """Compact event list: parallel op/u/v arrays plus the vertex count."""

    def __init__(self, n: int, seed: int | None = None):
        if n < 1:
            raise TraceError("trace needs at least one vertex")
        self.n = n
        self.seed = seed
        self.ops = bytearray()
        self.us = array("i")
        self.vs = array("i")

    def append(self, op: int, u: int, v: int) -> None:
        self.ops.append(op)
        self.us.append(u)
        self.vs.append(v)

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return zip(self.ops, self.us, self.vs)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Trace) and self.n == other.n
                and self.ops == other.ops and self.us == other.us
                and self.vs == other.vs)

    def events(self) -> list[tuple[int, int, int]]:
        return list(self)


def replay_edges(trace: Trace) -> set[tuple[int, int]]:
    """Validate applied-validity and return the edges live after replay."""
    live: set[tuple[int, int]] = set()
    n = trace.n
    for i, (op, u, v) in enumerate(trace):
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise TraceError(f"event {i}: bad endpoints ({u}, {v})")
        e = (u, v) if u < v else (v, u)
        if op == INSERT:
            if e in live:
                raise TraceError(f"event {i}: insert of present edge {e}")
            live.add(e)
        else:
            if e not in live:
                raise TraceError(f"event {i}: delete of absent edge {e}")
            live.remove(e)
    return live


def append_teardown(trace: Trace) -> Trace:
    """Copy of the trace plus deletions of all surviving edges, ordered
    lexicographically (min endpoint, then max), so the final graph is empty."""
    live = replay_edges(trace)
    out = Trace(trace.n, trace.seed)
    out.ops = bytearray(trace.ops)
    out.us = array("i", trace.us)
    out.vs = array("i", trace.vs)
    for u, v in sorted(live):
        out.append(DELETE, u, v)
    return out


# -- generators ---------------------------------------------------------------


class _LiveEdges:
    """Present-edge set with O(1) insert, delete, and uniform sampling."""

    def __init__(self):
        self.keys: list[tuple[int, int]] = []
        self.pos: dict[tuple[int, int], int] = {}

    def __len__(self):
        return len(self.keys)

    def __contains__(self, e):
        return e in self.pos

    def add(self, e):
        self.pos[e] = len(self.keys)
        self.keys.append(e)

    def remove(self, e):
        i = self.pos.pop(e)
        moved = self.keys.pop()
        if i < len(self.keys):
            self.keys[i] = moved
            self.pos[moved] = i

    def sample(self, rng: random.Random):
        return self.keys[rng.randrange(len(self.keys))]


def _edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def gen_random(n: int, t: int, p_delete: float, seed: int) -> Trace:
    """Each step: delete a uniform present edge with probability p_delete
    (when one exists), else insert a uniform absent pair."""
    if not 0 <= p_delete < 1:
        raise TraceError(f"p_delete must be in [0, 1): {p_delete}")
    if t < 0:
        raise TraceError(f"negative trace length: {t}")
    if n < 2 and t > 0:
        raise TraceError("need at least 2 vertices to generate events")
    rng = random.Random(seed)
    rand, randrange = rng.random, rng.randrange
    tr = Trace(n, seed)
    ops, us, vs = tr.ops, tr.us, tr.vs
    keys: list[int] = []        # packed live edges, u*n+v with u < v
    pos: dict[int, int] = {}
    max_edges = n * (n - 1) // 2
    for _ in range(t):
        m = len(keys)
        if m and (m == max_edges or rand() < p_delete):
            i = randrange(m)
            k = keys[i]
            moved = keys.pop()
            if i < m - 1:
                keys[i] = moved
                pos[moved] = i
            del pos[k]
            u, v = divmod(k, n)
            ops.append(DELETE)
            us.append(u)
            vs.append(v)
            continue
        if m * 10 >= max_edges * 9 and n <= 512:
            # dense endgame: enumerate the few absent pairs
            absent = [a * n + b for a in range(n) for b in range(a + 1, n)
                      if a * n + b not in pos]
            k = absent[randrange(len(absent))]
        else:
            while True:
                u = randrange(n)
                v = randrange(n)
                if u != v:
                    k = u * n + v if u < v else v * n + u
                    if k not in pos:
                        break
        pos[k] = len(keys)
        keys.append(k)
        u, v = divmod(k, n)
        ops.append(INSERT)
        us.append(u)
        vs.append(v)
    return tr


def gen_skew_star(n: int, t: int, hub_fraction: float, seed: int) -> Trace:
    """Hub-centric stress workload.

    A few hub vertices each hold a star of spokes that are pre-matched in
    pairs among themselves, plus one dedicated partner.  The partner edge is
    repeatedly deleted and re-inserted: each deletion frees a hub whose
    out-degree is its full spoke count, forcing high level rises in the
    leveled engine while costing a full-neighborhood scan in degree-greedy
    baselines.  Remaining steps churn short-lived edges between a couple of
    filler vertices and a permanently matched pair, so they never touch any
    matching.
    """
    if not 0 < hub_fraction <= 1:
        raise TraceError(f"hub_fraction must be in (0, 1]: {hub_fraction}")
    if t < 1:
        raise TraceError(f"trace length must be positive: {t}")
    hubs = max(1, round(hub_fraction * n))
    if n < 2 * hubs + 6:
        raise TraceError(f"n={n} too small for {hubs} hubs")
    rng = random.Random(seed)
    tr = Trace(n, seed)
    partner = [hubs + h for h in range(hubs)]
    blocked = (2 * hubs, 2 * hubs + 1)
    fillers = (2 * hubs + 2, 2 * hubs + 3)
    spoke_lo = 2 * hubs + 4
    spokes = (n - spoke_lo) // 2 * 2   # paired spokes only; an odd leftover idles
    width = min(max(12, round(n**0.75 / 4)), spokes)

    events: list[tuple[int, int, int]] = []
    events.append((INSERT, *blocked))
    for i in range(spoke_lo, spoke_lo + spokes, 2):
        events.append((INSERT, i, i + 1))
    for h in range(hubs):
        events.append((INSERT, h, partner[h]))
    for h in range(hubs):
        base = (h * width) % spokes
        for k in range(width):
            events.append((INSERT, h, spoke_lo + (base + k) % spokes))
    partner_live = [False] * hubs
    for op, u, v in events[:t]:
        tr.append(op, u, v)
        if u < hubs and v == partner[u]:
            partner_live[u] = True
    hub_rr = 0
    filler_pairs = [(fillers[0], blocked[0]), (fillers[0], blocked[1]),
                    (fillers[1], blocked[0]), (fillers[1], blocked[1])]
    filler_idx = 0
    filler_live = False
    while len(tr) < t:
        if rng.random() < 1 / 16:
            h = hub_rr % hubs
            hub_rr += 1
            if partner_live[h]:
                tr.append(DELETE, h, partner[h])
            else:
                tr.append(INSERT, h, partner[h])
            partner_live[h] = not partner_live[h]
        elif filler_live:
            tr.append(DELETE, *filler_pairs[filler_idx])
            filler_idx = (filler_idx + 1) % len(filler_pairs)
            filler_live = False
        else:
            tr.append(INSERT, *filler_pairs[filler_idx])
            filler_live = True
    return tr


def gen_sliding_window(n: int, t: int, window: int, seed: int) -> Trace:
    """Each inserted edge is deleted exactly ``window`` steps later; steps
    with no due deletion insert a fresh uniform absent pair."""
    if window < 1:
        raise TraceError(f"window must be >= 1: {window}")
    if t < 0:
        raise TraceError(f"negative trace length: {t}")
    max_edges = n * (n - 1) // 2 if n > 1 else 0
    if t > 0 and max_edges <= window:
        raise TraceError(f"window {window} too large for n={n}")
    rng = random.Random(seed)
    tr = Trace(n, seed)
    live = _LiveEdges()
    due: dict[int, tuple[int, int]] = {}
    for i in range(t):
        edge = due.pop(i - window, None)
        if edge is not None:
            live.remove(edge)
            tr.append(DELETE, *edge)
            continue
        while True:
            u = rng.randrange(n)
            v = rng.randrange(n)
            if u != v and _edge(u, v) not in live:
                break
        e = _edge(u, v)
        live.add(e)
        due[i] = e
        tr.append(INSERT, *e)
    return tr


GENERATORS = {
    "random": gen_random,
    "skew_star": gen_skew_star,
    "sliding_window": gen_sliding_window,
}


# -- codec ---------------------------------------------------------------------


def encode(trace: Trace) -> str:
    lines = [f"n={trace.n} t={len(trace)}"]
    for op, u, v in trace:
        lines.append(f"{'+' if op == INSERT else '-'} {u} {v}")
    lines.append("")
    return "\n".join(lines)


def decode(text: str) -> Trace:
    """Parse and eagerly validate a trace file; errors carry line numbers."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TraceError("line 1: missing header")
    header = lines[0].split()
    if (len(header) != 2 or not header[0].startswith("n=")
            or not header[1].startswith("t=")):
        raise TraceError(f"line 1: bad header {lines[0]!r}")
    try:
        n = int(header[0][2:])
        t = int(header[1][2:])
    except ValueError:
        raise TraceError(f"line 1: bad header {lines[0]!r}") from None
    if len(lines) - 1 != t:
        raise TraceError(f"line {len(lines)}: expected {t} events, got {len(lines) - 1}")
    tr = Trace(n)
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != 3 or parts[0] not in ("+", "-"):
            raise TraceError(f"line {i}: malformed event {line!r}")
        try:
            u = int(parts[1])
            v = int(parts[2])
        except ValueError:
            raise TraceError(f"line {i}: malformed event {line!r}") from None
        tr.append(INSERT if parts[0] == "+" else DELETE, u, v)
    try:
        replay_edges(tr)
    except TraceError as exc:
        raise TraceError(f"invalid trace: {exc}") from None
    return tr


def generate(kind: str, n: int, t: int, seed: int, *, p_delete: float = 0.5,
             hub_fraction: float = 0.05, window: int = 10,
             teardown: bool = False) -> Trace:
    """Uniform front door over the named generators."""
    if kind == "random":
        tr = gen_random(n, t, p_delete, seed)
    elif kind == "skew_star":
        tr = gen_skew_star(n, t, hub_fraction, seed)
    elif kind == "sliding_window":
        tr = gen_sliding_window(n, t, window, seed)
    else:
        raise TraceError(f"unknown workload kind {kind!r}")
    return append_teardown(tr) if teardown else tr
