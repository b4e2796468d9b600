"""The four behavioral queries, answered on the component store.

Query 1 (path containment) prunes candidates through the transit-edge
index and verifies against the reconstructed walk, so its answers match a
brute-force substring search over every stored sequence.  Queries 2-4 work
on stored components and per-drive component sets directly.  Everything
here is read-only against a store snapshot.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from statistics import fmean
from typing import Sequence

from .decompose import reconstruct
from .errors import UnknownDrive
from .model import Component, ComponentKind, StateId, TransitEdge
from .store import ComponentStore

MODE_ALL = "all"
MODE_CYCLES = "cycles"


@dataclass(frozen=True)
class PathQuery:
    """Ordered state sequence to look for; length >= 2, states distinct.

    ``within_component`` restricts matches to single stored components (the
    narrower graph-database behavior); the default searches the whole
    reconstructed walk, so matches may span component boundaries.
    """

    states: tuple[StateId, ...]
    within_component: bool = False

    def __post_init__(self) -> None:
        if len(self.states) < 2:
            raise ValueError("path query needs at least two states")
        if len(set(self.states)) != len(self.states):
            raise ValueError("path query states must be distinct")


@dataclass(frozen=True)
class PathMatch:
    drive_id: str
    component_ids: tuple[str, ...]


@dataclass(frozen=True)
class PathQueryResult:
    matches: tuple[PathMatch, ...]
    unknown_states: tuple[StateId, ...]


@dataclass(frozen=True)
class BetweenResult:
    path_ids: tuple[str, ...]
    cycle_ids: tuple[str, ...]
    unknown_states: tuple[StateId, ...]


@dataclass(frozen=True)
class CycleReport:
    component_id: str
    cycle_length: int
    n_drives: int
    avg_visits_per_drive: float


@dataclass(frozen=True)
class Cluster:
    component_ids: frozenset[str]
    drive_ids: tuple[str, ...]


@dataclass(frozen=True)
class ClusterResult:
    clusters: tuple[Cluster, ...]
    unclustered: tuple[str, ...]


def _contains_run(haystack: Sequence[StateId], needle: Sequence[StateId]) -> bool:
    n, m = len(haystack), len(needle)
    first = needle[0]
    for i in range(n - m + 1):
        if haystack[i] == first and tuple(haystack[i : i + m]) == tuple(needle):
            return True
    return False


def component_contains_path(comp: Component, states: Sequence[StateId]) -> bool:
    """Structural containment of an ordered state run inside one component.

    Paths match on a contiguous slice; cycles match along their circular
    traversal (any rotation), which is what repeated traversals expose.
    """
    states = tuple(states)
    if comp.kind is ComponentKind.PATH:
        return _contains_run(comp.vertices, states)
    opened = comp.open_vertices
    if len(states) - 1 > len(opened):
        return False
    doubled = opened + opened
    return _contains_run(doubled[: len(opened) + len(states) - 1], states)


def find_drives_through_path(store: ComponentStore, query: PathQuery) -> PathQueryResult:
    """Query 1: which drives traversed exactly this state run."""
    known = store.known_states
    unknown = tuple(s for s in query.states if s not in known)
    if unknown:
        return PathQueryResult((), unknown)

    containing = [
        cid for cid, comp in store.components.items()
        if component_contains_path(comp, query.states)
    ]
    if query.within_component:
        candidates: set[str] = set()
        for cid in containing:
            candidates.update(d for d, _ in store.sequences_for_component(cid))
        matches = []
        for drive_id in sorted(candidates):
            ids = sorted(set(containing) & store.component_ids_of_drive(drive_id))
            matches.append(PathMatch(drive_id, tuple(ids)))
        return PathQueryResult(tuple(matches), ())

    # candidate drives must own every query edge in some component
    candidate_drives: set[str] | None = None
    for i in range(len(query.states) - 1):
        edge = TransitEdge(query.states[i], query.states[i + 1])
        owners: set[str] = set()
        for cid in store.component_ids_with_edge(edge):
            owners.update(d for d, _ in store.sequences_for_component(cid))
        candidate_drives = owners if candidate_drives is None \
            else candidate_drives & owners
        if not candidate_drives:
            return PathQueryResult((), ())

    containing_set = set(containing)
    matches = []
    for drive_id in sorted(candidate_drives or ()):
        hit = False
        for app_id in sorted(store.apps_of_drive(drive_id)):
            walk = reconstruct(store.decomposition_for(drive_id, app_id))
            if _contains_run(walk, query.states):
                hit = True
                break
        if hit:
            ids = sorted(containing_set & store.component_ids_of_drive(drive_id))
            matches.append(PathMatch(drive_id, tuple(ids)))
    return PathQueryResult(tuple(matches), ())


def find_paths_between(store: ComponentStore, a: StateId, b: StateId,
                       order_aware: bool = True) -> BetweenResult:
    """Query 2: stored components connecting two states of interest.

    Order-aware counts a component only when ``a`` is reached before ``b``
    along its traversal (for cycles: from some entry vertex a drive
    actually used).  Order-unaware only requires both states, reproducing
    the transit-node model's over-count.
    """
    if a == b:
        raise ValueError("states of interest must differ")
    known = store.known_states
    unknown = tuple(s for s in (a, b) if s not in known)
    if unknown:
        return BetweenResult((), (), unknown)

    paths: list[str] = []
    cycles: list[str] = []
    for cid in sorted(store.components):
        comp = store.components[cid]
        opened = comp.open_vertices
        if a not in opened or b not in opened:
            continue
        if comp.kind is ComponentKind.PATH:
            if not order_aware or opened.index(a) < opened.index(b):
                paths.append(cid)
        else:
            if order_aware:
                k = len(opened)
                ia, ib = opened.index(a), opened.index(b)
                for entry in store.cycle_entries(cid):
                    ie = opened.index(entry)
                    if (ia - ie) % k < (ib - ie) % k:
                        cycles.append(cid)
                        break
            else:
                cycles.append(cid)
    return BetweenResult(tuple(paths), tuple(cycles), ())


def find_repeated_cycles(store: ComponentStore, *, min_avg_visits: float = 1.0,
                         min_drives: int = 10, limit: int = 20) -> list[CycleReport]:
    """Query 3: cycles several drives are stuck in.

    A drive qualifies for a cycle when its total visits (occurrence repeat
    counts summed over all its sequences) strictly exceed
    ``min_avg_visits``; cycles with at least ``min_drives`` qualifying
    drives are reported, longest first.
    """
    if min_drives < 1:
        raise ValueError("min_drives must be >= 1")
    visits: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for drive_id, _app_id, occurrences in store.iter_sequences():
        for occ in occurrences:
            comp = store.component(occ.component_id)
            if comp.kind is ComponentKind.CYCLE:
                visits[occ.component_id][drive_id] += occ.repeat_count
    reports = []
    for cid, per_drive in visits.items():
        qualifying = [v for v in per_drive.values() if v > min_avg_visits]
        if len(qualifying) >= min_drives:
            comp = store.component(cid)
            reports.append(CycleReport(
                component_id=cid,
                cycle_length=comp.edge_count,
                n_drives=len(qualifying),
                avg_visits_per_drive=fmean(qualifying),
            ))
    reports.sort(key=lambda r: (-r.cycle_length, r.component_id))
    return reports[:limit]


def _drive_component_sets(store: ComponentStore, mode: str) -> dict[str, frozenset[str]]:
    if mode not in (MODE_ALL, MODE_CYCLES):
        raise ValueError(f"mode must be {MODE_ALL!r} or {MODE_CYCLES!r}, got {mode!r}")
    kind = ComponentKind.CYCLE if mode == MODE_CYCLES else None
    return {d: store.component_ids_of_drive(d, kind) for d in store.drive_ids}


def cluster_by_components(store: ComponentStore, mode: str = MODE_ALL) -> ClusterResult:
    """Query 4: group drives by equality of their distinct component sets.

    Groups of one drive are reported separately as unclustered.  In
    cycles-only mode drives without any cycle share the empty set and may
    form a cluster of their own.
    """
    groups: dict[frozenset[str], list[str]] = defaultdict(list)
    for drive_id, ids in _drive_component_sets(store, mode).items():
        groups[ids].append(drive_id)
    clusters = [
        Cluster(ids, tuple(sorted(drives)))
        for ids, drives in groups.items() if len(drives) > 1
    ]
    clusters.sort(key=lambda c: (-len(c.drive_ids), c.drive_ids[0]))
    unclustered = sorted(
        drives[0] for drives in groups.values() if len(drives) == 1
    )
    return ClusterResult(tuple(clusters), tuple(unclustered))


def jaccard_distance(store: ComponentStore, drive_a: str, drive_b: str,
                     mode: str = MODE_ALL) -> float:
    """1 - |A intersect B| / |A union B| over component-id sets; 0 when both empty."""
    for drive_id in (drive_a, drive_b):
        if not store.has_drive(drive_id):
            raise UnknownDrive(f"no drive {drive_id!r} in store")
    kind = ComponentKind.CYCLE if mode == MODE_CYCLES else None
    if mode not in (MODE_ALL, MODE_CYCLES):
        raise ValueError(f"mode must be {MODE_ALL!r} or {MODE_CYCLES!r}, got {mode!r}")
    set_a = store.component_ids_of_drive(drive_a, kind)
    set_b = store.component_ids_of_drive(drive_b, kind)
    union = set_a | set_b
    if not union:
        return 0.0
    return 1.0 - len(set_a & set_b) / len(union)
