"""Work counters and the epoch ledger behind the amortized-cost checks.

An *epoch* is the maximal interval during which one specific edge stays
matched.  The engine reports every epoch creation and termination here,
together with elementary-work counters (one unit per list mutation, bucket
probe, or neighbor scan).  Settle calls run inside *charge scopes*: the work
accrued in a scope is assigned to a single epoch, so that afterwards

    total work == per-update overhead + sum of per-epoch charges

holds exactly.  Deterministic settles charge the epoch whose termination
freed the vertex; randomized settles charge the epoch they create, except
that the cost of lifting the freshly picked mate is carried as *debt* into
the next recursion level's epoch when the engine re-settles that mate.

Each epoch created by a randomized settle terminates up to two older epochs
(the picked mate's old epoch, and the previous epoch of the recursion
chain); those links form the termination forest used for the recursive
cost roll-up.

Deep tracking additionally snapshots the initiator's out list at creation
and logs graph deletions, enabling the uninterrupted-duration statistic:
how many of the snapshot edges left the graph up to and including the
epoch's own edge.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .core import POW3

NATURAL = "natural"
INDUCED = "induced"


@dataclass
class EpochRecord:
    """Lifecycle of one matched edge."""

    eid: int
    edge: tuple[int, int]           # (min, max) endpoint ids
    level: int
    initiator: int
    creator: str                    # "insert" | "settle" | "rise"
    created_at: int                 # update-step index
    terminated_at: int | None = None
    cause: str | None = None        # NATURAL or INDUCED
    terminated_by: int | None = None  # eid of the epoch whose creation ended this one
    charged_work: int = 0
    snapshot_out: tuple[int, ...] | None = None


class Metrics:
    """Counters, charge scopes, and the epoch store for one engine instance.

    ``work``, ``scans``, ``flips`` and the active-scope accumulator ``scope``
    are plain attributes; hot paths bump them directly, cold paths go
    through the hook methods (same arithmetic).
    """

    def __init__(self, deep_tracking: bool = False):
        self.deep_tracking = deep_tracking
        self.updates = 0
        self.work = 0
        self.scans = 0
        self.flips = 0
        self.overhead_work = 0
        self.max_recursion_depth = 0
        self.epochs: list[EpochRecord] = []
        self.live: dict[tuple[int, int], int] = {}   # edge -> eid
        self.deletion_log: list[tuple[int, int, int]] = []  # (step, u, v)
        self.scope = 0             # work accrued in the active charge scope
        self._stack: list[int] = []

    # -- record hooks --------------------------------------------------------

    def on_work(self, k: int = 1) -> None:
        self.work += k
        self.scope += k

    def on_scan(self, k: int = 1) -> None:
        self.work += k
        self.scans += k
        self.scope += k

    def on_flip(self, k: int = 1) -> None:
        self.flips += k

    def on_epoch_created(self, edge: tuple[int, int], level: int, initiator: int,
                         creator: str, snapshot: tuple[int, ...] | None = None) -> int:
        eid = len(self.epochs)
        rec = EpochRecord(eid, edge, level, initiator, creator, self.updates,
                          snapshot_out=snapshot)
        self.epochs.append(rec)
        self.live[edge] = eid
        return eid

    def on_epoch_terminated(self, edge: tuple[int, int], cause: str) -> int:
        eid = self.live.pop(edge)
        rec = self.epochs[eid]
        rec.terminated_at = self.updates
        rec.cause = cause
        return eid

    def on_update_done(self) -> None:
        """Close the per-update bookkeeping; drains the base scope."""
        if self._stack:
            raise RuntimeError("unbalanced charge scopes at update end")
        self.overhead_work += self.scope
        self.scope = 0
        self.updates += 1

    def on_deletion(self, u: int, v: int) -> None:
        if self.deep_tracking:
            self.deletion_log.append((self.updates, u, v))

    # -- charge scopes ---------------------------------------------------------

    def push_scope(self) -> None:
        self._stack.append(self.scope)
        self.scope = 0

    def pop_scope(self) -> int:
        got = self.scope
        self.scope = self._stack.pop()
        return got

    def charge(self, eid: int | None, amount: int) -> None:
        if eid is None:
            self.overhead_work += amount
        else:
            self.epochs[eid].charged_work += amount

    def note_recursion_depth(self, depth: int) -> None:
        if depth > self.max_recursion_depth:
            self.max_recursion_depth = depth

    # -- derived views -----------------------------------------------------------

    def charged_total(self) -> int:
        return sum(rec.charged_work for rec in self.epochs)

    def epochs_by_level(self, terminated_only: bool = False) -> dict[int, int]:
        counts: dict[int, int] = {}
        for rec in self.epochs:
            if terminated_only and rec.cause is None:
                continue
            counts[rec.level] = counts.get(rec.level, 0) + 1
        return counts

    def recursive_costs(self) -> list[int]:
        """Per-epoch rolled-up work: own charge plus charges of the epochs
        this epoch's creation terminated, recursively."""
        children: dict[int, list[int]] = {}
        for rec in self.epochs:
            if rec.terminated_by is not None:
                children.setdefault(rec.terminated_by, []).append(rec.eid)
        rolled = [0] * len(self.epochs)

        def roll(eid: int) -> int:
            total = self.epochs[eid].charged_work
            for child in children.get(eid, ()):
                total += roll(child)
            rolled[eid] = total
            return total

        for rec in self.epochs:
            if rec.terminated_by is None:
                roll(rec.eid)
        return rolled

    def max_charge_ratio(self) -> float:
        """Max over terminated epochs of charged work / 3^level."""
        best = 0.0
        for rec in self.epochs:
            if rec.cause is not None:
                ratio = rec.charged_work / POW3[rec.level]
                if ratio > best:
                    best = ratio
        return best

    def max_recursive_ratio(self) -> float:
        """Max over terminated epochs of rolled-up work / 3^level."""
        rolled = self.recursive_costs()
        best = 0.0
        for rec in self.epochs:
            if rec.cause is not None:
                ratio = rolled[rec.eid] / POW3[rec.level]
                if ratio > best:
                    best = ratio
        return best

    def report(self) -> dict:
        created = self.epochs_by_level()
        terminated = self.epochs_by_level(terminated_only=True)
        n_term = sum(terminated.values())
        return {
            "updates": self.updates,
            "work": self.work,
            "work_per_update": self.work / max(self.updates, 1),
            "scans": self.scans,
            "scans_per_update": self.scans / max(self.updates, 1),
            "flips": self.flips,
            "overhead_work": self.overhead_work,
            "charged_work": self.work - self.overhead_work,
            "epochs_created": len(self.epochs),
            "epochs_terminated": n_term,
            "epochs_alive": len(self.epochs) - n_term,
            "epochs_created_by_level": {str(k): v for k, v in sorted(created.items())},
            "epochs_terminated_by_level": {str(k): v for k, v in sorted(terminated.items())},
            "max_recursion_depth": self.max_recursion_depth,
            "max_charge_ratio": self.max_charge_ratio(),
            "max_recursive_ratio": self.max_recursive_ratio(),
        }


def report_kv_lines(report: dict, prefix: str = "") -> list[str]:
    """Flatten a report dict into sorted ``key=value`` lines."""
    lines: list[str] = []
    for k in sorted(report):
        v = report[k]
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            lines.extend(report_kv_lines(v, prefix=f"{name}."))
        else:
            lines.append(f"{name}={v}")
    return lines


# -- uninterrupted durations -------------------------------------------------


def deletion_times(deletion_log: list[tuple[int, int, int]]) -> dict[tuple[int, int], list[int]]:
    """Index graph deletions by undirected edge; the log is chronological,
    so per-edge step lists come out sorted."""
    times: dict[tuple[int, int], list[int]] = {}
    for step, u, v in deletion_log:
        edge = (u, v) if u < v else (v, u)
        times.setdefault(edge, []).append(step)
    return times


def uninterrupted_duration(rec: EpochRecord,
                           times: dict[tuple[int, int], list[int]]) -> int:
    """How many snapshot out-edges of the initiator were deleted from the
    graph up to and including the deletion of the epoch's own edge.

    Requires deep tracking and a trace that ends with an empty graph, so
    that every snapshot edge has a deletion on record.
    """
    if rec.snapshot_out is None:
        raise ValueError(f"epoch {rec.eid} carries no snapshot (deep tracking off)")
    init = rec.initiator
    created = rec.created_at

    def first_deletion_after(a: int, b: int) -> int:
        edge = (a, b) if a < b else (b, a)
        steps = times.get(edge)
        if steps is None:
            raise ValueError(f"edge {edge} never deleted; trace must end empty")
        i = bisect_right(steps, created)
        if i == len(steps):
            raise ValueError(f"edge {edge} not deleted after step {created}")
        return steps[i]

    u, v = rec.edge
    own = first_deletion_after(u, v)
    return sum(1 for x in rec.snapshot_out if first_deletion_after(init, x) <= own)


def duration_uniformity(samples: list[tuple[int, int]], bins: int = 10) -> dict:
    """Chi-square goodness of fit of normalized durations against uniform.

    ``samples`` holds (duration, pool_size) pairs; under the model each
    duration is uniform on {1..pool_size}, so the expected mass of bin
    (a, b] is (floor(b*p) - floor(a*p)) / p, computed exactly per sample.
    """
    from scipy.stats import chi2

    observed = [0.0] * bins
    expected = [0.0] * bins
    for dur, pool in samples:
        if not (1 <= dur <= pool):
            raise ValueError(f"duration {dur} outside [1, {pool}]")
        observed[min(int((dur * bins - 1) // pool), bins - 1)] += 1
        prev = 0
        for b in range(bins):
            edge = ((b + 1) * pool) // bins
            expected[b] += (edge - prev) / pool
            prev = edge
    stat = sum((o - e) ** 2 / e for o, e in zip(observed, expected) if e > 0)
    dof = bins - 1
    return {
        "samples": len(samples),
        "bins": bins,
        "observed": observed,
        "expected": expected,
        "statistic": stat,
        "p_value": float(chi2.sf(stat, dof)) if samples else 1.0,
    }
