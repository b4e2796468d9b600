"""Core vocabulary: FSA states and edges, walks, and their components.

A component is either a simple path (ordered, all vertices distinct) or a
cycle (first vertex = last vertex, interior vertices distinct).  Cycles are
identified by their edge set, so they are stored in a canonical rotation and
addressed by a content hash; where a drive actually entered the cycle lives
on the :class:`Occurrence`, not on the component.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Iterator, Mapping, Sequence

from .errors import NotACycle

# Opaque state label of the application FSA, e.g. "S_1710". Equality is
# exact string equality.
StateId = str


class ComponentKind(str, Enum):
    PATH = "path"
    CYCLE = "cycle"


@dataclass(frozen=True, slots=True)
class TransitEdge:
    """Directed FSA edge. (a, b) != (b, a) unless a == b; self-edges are legal."""

    start: StateId
    end: StateId


def component_hash(kind: ComponentKind, vertices: Sequence[StateId]) -> str:
    """Content id for a component: truncated SHA-256 (128 bit, hex).

    The preimage is the kind tag plus each vertex label prefixed with its
    byte length, so distinct vertex lists can never collide by
    concatenation (["AB"] vs ["A", "B"]) and a path can never collide with
    a cycle.  Cycles must already be in canonical rotation.
    """
    h = hashlib.sha256()
    h.update(b"C" if kind is ComponentKind.CYCLE else b"P")
    for v in vertices:
        b = v.encode("utf-8")
        h.update(str(len(b)).encode("ascii"))
        h.update(b":")
        h.update(b)
    return h.hexdigest()[:32]


@dataclass(frozen=True, slots=True)
class Component:
    """A deduplicated simple path or canonical cycle.

    ``vertices`` is the ordered vertex list; for cycles it is closed
    (first == last) and starts at the lexicographically smallest vertex.
    Build instances through :meth:`simple_path` / :meth:`cycle` so the
    invariants and the content id are always consistent.
    """

    kind: ComponentKind
    vertices: tuple[StateId, ...]
    component_id: str

    @staticmethod
    def simple_path(vertices: Sequence[StateId]) -> "Component":
        verts = tuple(vertices)
        if not verts:
            raise ValueError("a simple path needs at least one vertex")
        if len(set(verts)) != len(verts):
            raise ValueError(f"vertices repeat in simple path {verts!r}")
        if any(not v for v in verts):
            raise ValueError("state labels must be non-empty")
        return Component(ComponentKind.PATH, verts,
                         component_hash(ComponentKind.PATH, verts))

    @staticmethod
    def cycle(vertices: Sequence[StateId]) -> "Component":
        return canonicalize_cycle(vertices)

    @property
    def open_vertices(self) -> tuple[StateId, ...]:
        """Vertex list without the closing duplicate (cycles) / as-is (paths)."""
        return self.vertices[:-1] if self.kind is ComponentKind.CYCLE else self.vertices

    @property
    def vertex_count(self) -> int:
        """Distinct vertices: k for a k-cycle, m for an m-vertex path."""
        return len(self.open_vertices)

    @property
    def edge_count(self) -> int:
        """k for a k-cycle, m - 1 for an m-vertex path."""
        return len(self.vertices) - 1

    def edges(self) -> Iterator[TransitEdge]:
        verts = self.vertices
        for i in range(len(verts) - 1):
            yield TransitEdge(verts[i], verts[i + 1])

    def rotation_from(self, entry: StateId) -> tuple[StateId, ...]:
        """Closed traversal of a cycle starting (and ending) at ``entry``.

        Paths are returned as stored; their traversal has one fixed order.
        """
        if self.kind is ComponentKind.PATH:
            return self.vertices
        opened = self.open_vertices
        try:
            j = opened.index(entry)
        except ValueError:
            raise NotACycle(f"{entry!r} is not a vertex of cycle {self.component_id}")
        rotated = opened[j:] + opened[:j]
        return rotated + (rotated[0],)


def canonicalize_cycle(vertices: Sequence[StateId]) -> Component:
    """Normalize a closed vertex list to the cycle's canonical rotation.

    The canonical rotation starts at the lexicographically smallest vertex
    (unique, since interior vertices are distinct), so every rotation of
    the same cycle maps to one component_id.  A self-loop (a, a) is a legal
    cycle of one edge.
    """
    verts = tuple(vertices)
    if len(verts) < 2:
        raise NotACycle(f"cycle needs at least one edge, got {verts!r}")
    if verts[0] != verts[-1]:
        raise NotACycle(f"first vertex {verts[0]!r} != last vertex {verts[-1]!r}")
    opened = verts[:-1]
    if len(set(opened)) != len(opened):
        raise NotACycle(f"interior vertex repeats in {verts!r}")
    if any(not v for v in opened):
        raise NotACycle("state labels must be non-empty")
    j = min(range(len(opened)), key=opened.__getitem__)
    rotated = opened[j:] + opened[:j]
    closed = rotated + (rotated[0],)
    return Component(ComponentKind.CYCLE, closed,
                     component_hash(ComponentKind.CYCLE, closed))


@dataclass(frozen=True, slots=True)
class Occurrence:
    """One appearance of a component inside a drive's decomposition.

    ``entry_vertex`` records where this drive entered the component (for
    cycles this is the information the canonical rotation drops);
    ``repeat_count`` run-length-encodes immediately repeated traversals of
    the same cycle.  Paths always have entry = first vertex and repeat 1.
    """

    component_id: str
    entry_vertex: StateId
    repeat_count: int
    position: int


@dataclass(frozen=True)
class Walk:
    """Ordered, optionally timestamped state sequence of one (drive, app) pair.

    ``timestamps``, when present, must align with ``vertices`` and be
    non-decreasing.  Synthetic walks may omit them.
    """

    drive_id: str
    vehicle_id: str
    app_id: str
    vertices: tuple[StateId, ...]
    timestamps: tuple[datetime, ...] | None = None

    def __post_init__(self) -> None:
        if self.timestamps is not None:
            if len(self.timestamps) != len(self.vertices):
                raise ValueError("timestamps and vertices length mismatch")
            if any(b < a for a, b in zip(self.timestamps, self.timestamps[1:])):
                raise ValueError("timestamps must be non-decreasing")

    def edges(self) -> Iterator[TransitEdge]:
        for i in range(len(self.vertices) - 1):
            yield TransitEdge(self.vertices[i], self.vertices[i + 1])


@dataclass(frozen=True)
class Decomposition:
    """Ordered component occurrences that losslessly rebuild one walk.

    ``components`` resolves every component_id referenced by the
    occurrences; it may be a view of a larger shared table.
    """

    drive_id: str
    app_id: str
    occurrences: tuple[Occurrence, ...]
    components: Mapping[str, Component]

    def distinct_component_ids(self) -> frozenset[str]:
        return frozenset(o.component_id for o in self.occurrences)
