"""Synthetic FSA and walk workload generation, plus the convergence experiment.

Walk generation models habitual usage: ``reuse_skew`` interpolates between
uniform out-edge choice (0) and Zipf-like preferential reuse (1).  The
habitual part combines a seed-derived static preference per state, shared
by the whole workload so the corpus converges onto few components, with
quadratic within-walk reinforcement of transitions already taken, which
produces the immediately repeated cycles run-length encoding rewards.

Everything is a pure function of (parameters, seed): per-walk generators
run on sub-seeds derived by hashing, so results do not depend on
scheduling or generation order.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Iterable, Iterator, Mapping, Sequence

from .decompose import decompose
from .errors import DeadEnd, InfeasibleParameters
from .ingest import LogEvent
from .model import StateId, TransitEdge, Walk
from .store import ComponentStore

_AREAS = ("NAV", "MEDIA", "PHONE", "RADIO", "SETUP", "CLIMATE", "APPS", "VOICE")
_WIDGETS = ("MAIN", "LIST", "DETAIL", "INPUT", "RESULT", "POPUP", "EDIT", "MAP")

_ZIPF_EXPONENT = 2.5


@dataclass(frozen=True)
class Fsa:
    states: tuple[StateId, ...]
    out_neighbors: Mapping[StateId, tuple[StateId, ...]]

    @property
    def edges(self) -> frozenset[TransitEdge]:
        return frozenset(
            TransitEdge(u, v)
            for u, targets in self.out_neighbors.items()
            for v in targets
        )


@dataclass(frozen=True)
class WorkloadConfig:
    """Knobs of one synthetic workload; defaults give a habitual, skewed load."""

    n_states: int = 30
    n_edges: int = 90
    n_walks: int = 1000
    reuse_skew: float = 0.9
    seed: int = 0
    mean_length: int = 50
    max_length: int = 500
    app_id: str = "sim"
    drives_per_vehicle: int = 4


def state_label(i: int) -> StateId:
    area = _AREAS[i % len(_AREAS)]
    widget = _WIDGETS[(i // len(_AREAS)) % len(_WIDGETS)]
    return f"ST_{area}_{widget}_{i:04d}"


def _derive_seed(seed: int, tag: str) -> int:
    digest = hashlib.sha256(f"{seed}|{tag}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def generate_fsa(n_states: int, n_edges: int, seed: int = 0) -> Fsa:
    """Random directed graph (self-loops allowed) with out-degree >= 1 everywhere.

    Every state first gets one random out-edge so walks of any length
    exist; remaining edges are drawn uniformly from the unused pairs.
    """
    if n_states < 1:
        raise InfeasibleParameters("need at least one state")
    max_edges = n_states * n_states
    if n_edges < n_states:
        raise InfeasibleParameters(
            f"{n_edges} edges cannot give all {n_states} states an out-edge"
        )
    if n_edges > max_edges:
        raise InfeasibleParameters(
            f"{n_edges} edges exceed the {max_edges} possible directed pairs"
        )
    rng = random.Random(_derive_seed(seed, "fsa"))
    pairs: set[tuple[int, int]] = set()
    for u in range(n_states):
        pairs.add((u, rng.randrange(n_states)))
    free = [(u, v) for u in range(n_states) for v in range(n_states)
            if (u, v) not in pairs]
    pairs.update(rng.sample(free, n_edges - len(pairs)))
    labels = tuple(state_label(i) for i in range(n_states))
    out: dict[StateId, list[StateId]] = {label: [] for label in labels}
    for u, v in sorted(pairs):
        out[labels[u]].append(labels[v])
    return Fsa(labels, {u: tuple(vs) for u, vs in out.items()})


def _habit_profile(fsa: Fsa, seed: int) -> dict[StateId, tuple[float, ...]]:
    """Static Zipf-like preference over each state's out-edges, workload-wide."""
    rng = random.Random(_derive_seed(seed, "habit"))
    profile = {}
    for state in fsa.states:
        d = len(fsa.out_neighbors[state])
        ranks = list(range(d))
        rng.shuffle(ranks)
        profile[state] = tuple((ranks[j] + 1) ** -_ZIPF_EXPONENT for j in range(d))
    return profile


def _geometric_length(rng: random.Random, mean: int, cap: int) -> int:
    if mean <= 1:
        return 1
    p = 1.0 / mean
    u = rng.random()
    length = int(math.log(1.0 - u) / math.log(1.0 - p)) + 1
    return min(length, cap)


def iter_walks(fsa: Fsa, n_walks: int, *, reuse_skew: float = 0.0, seed: int = 0,
               mean_length: int = 50, max_length: int = 500,
               app_id: str = "sim", drives_per_vehicle: int = 4) -> Iterator[Walk]:
    """Stream walks one at a time; see :func:`generate_walks`."""
    if not 0.0 <= reuse_skew <= 1.0:
        raise InfeasibleParameters("reuse_skew must be within [0, 1]")
    habit = _habit_profile(fsa, seed)
    n = len(fsa.states)
    start_rng = random.Random(_derive_seed(seed, "starts"))
    start_ranks = list(range(n))
    start_rng.shuffle(start_ranks)
    start_weights = [
        (1.0 - reuse_skew) / n
        + reuse_skew * (start_ranks[i] + 1) ** -_ZIPF_EXPONENT
        for i in range(n)
    ]
    cum = list(_accumulate(start_weights))
    for i in range(n_walks):
        rng = random.Random(_derive_seed(seed, f"walk:{i}"))
        n_steps = _geometric_length(rng, mean_length, max_length)
        start = rng.choices(fsa.states, cum_weights=cum)[0]
        vertices = _random_walk(fsa, habit, rng, start, n_steps, reuse_skew)
        yield Walk(
            drive_id=f"d{i:06d}",
            vehicle_id=f"v{i // max(drives_per_vehicle, 1):05d}",
            app_id=app_id,
            vertices=tuple(vertices),
        )


def _random_walk(fsa: Fsa, habit, rng: random.Random, start: StateId,
                 n_steps: int, skew: float) -> list[StateId]:
    vertices = [start]
    taken: dict[tuple[StateId, int], int] = {}
    u = start
    for _ in range(n_steps):
        neighbors = fsa.out_neighbors[u]
        d = len(neighbors)
        if d == 0:
            raise DeadEnd(f"state {u!r} has no outgoing edge")
        if skew == 0.0 or d == 1:
            j = rng.randrange(d)
        else:
            prefs = habit[u]
            scored = [prefs[k] * (1 + taken.get((u, k), 0)) ** 2 for k in range(d)]
            z = sum(scored)
            uniform = (1.0 - skew) / d
            weights = [uniform + skew * s / z for s in scored]
            j = rng.choices(range(d), weights=weights)[0]
        taken[(u, j)] = taken.get((u, j), 0) + 1
        u = neighbors[j]
        vertices.append(u)
    return vertices


def generate_walks(fsa: Fsa, n_walks: int, **kwargs) -> list[Walk]:
    """Deterministic walk workload on ``fsa``; kwargs as in :func:`iter_walks`."""
    return list(iter_walks(fsa, n_walks, **kwargs))


def _accumulate(values: Sequence[float]) -> Iterator[float]:
    total = 0.0
    for v in values:
        total += v
        yield total


_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)


def walks_to_events(walks: Iterable[Walk], *, start: datetime = _EPOCH,
                    session_gap: timedelta = timedelta(hours=1),
                    step: timedelta = timedelta(seconds=1)) -> Iterator[LogEvent]:
    """Render walks as log events in the ingest interchange format.

    Walks without timestamps get synthetic ones: walk k starts at
    ``start + k * session_gap`` and advances ``step`` per state.
    """
    for k, walk in enumerate(walks):
        base = start + k * session_gap
        for i, state in enumerate(walk.vertices):
            ts = walk.timestamps[i] if walk.timestamps else base + i * step
            yield LogEvent(walk.vehicle_id, walk.drive_id, walk.app_id, state, ts)


@dataclass(frozen=True)
class ConvergencePoint:
    walks_ingested: int
    distinct_components: int
    occurrence_refs: int
    ratio: float
    stored_bytes: int


def convergence_report(walks: Iterable[Walk],
                       checkpoints: Sequence[int] | None = None,
                       store: ComponentStore | None = None) -> list[ConvergencePoint]:
    """Ingest walks and sample how the distinct-component pool grows.

    ``ratio`` is distinct components over occurrence references stored so
    far; under habitual usage it should fall as the corpus grows.  The
    final state is always included as the last row.
    """
    store = store if store is not None else ComponentStore()
    schedule = sorted(set(checkpoints)) if checkpoints else None
    points: list[ConvergencePoint] = []

    def snapshot(count: int) -> ConvergencePoint:
        stats = store.statistics()
        distinct = stats.n_distinct_cycles + stats.n_distinct_paths
        refs = store.n_occurrence_refs
        return ConvergencePoint(
            walks_ingested=count,
            distinct_components=distinct,
            occurrence_refs=refs,
            ratio=distinct / refs if refs else 0.0,
            stored_bytes=stats.stored_bytes,
        )

    count = 0
    for walk in walks:
        store.insert(decompose(walk), vehicle_id=walk.vehicle_id)
        count += 1
        if schedule is None:
            if count & (count - 1) == 0:  # powers of two
                points.append(snapshot(count))
        elif schedule and count == schedule[0]:
            schedule.pop(0)
            points.append(snapshot(count))
    if count and (not points or points[-1].walks_ingested != count):
        points.append(snapshot(count))
    return points


def convergence_csv(points: Sequence[ConvergencePoint]) -> str:
    lines = ["walks_ingested,distinct_components,ratio,stored_bytes"]
    for p in points:
        lines.append(
            f"{p.walks_ingested},{p.distinct_components},{p.ratio:.6f},{p.stored_bytes}"
        )
    return "\n".join(lines) + "\n"
