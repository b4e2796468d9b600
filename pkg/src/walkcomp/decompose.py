"""Split a walk into simple paths and a maximal number of cycles.

The splitter scans the walk once with a buffer of not-yet-emitted vertices.
When the current vertex ``u`` is already in the buffer at index ``i``, the
prefix ``buffer[0..i]`` (junction included) leaves as a simple path when
``i > 0``, and ``buffer[i..] + u`` leaves as a cycle; the buffer restarts
at ``u``.  A trailing single-vertex buffer after a cycle close is dropped
(it duplicates the cycle's exit), so a one-vertex path only ever comes from
a one-vertex walk.  Immediately repeated traversals of the same cycle are
run-length encoded into one occurrence.

``oracle_max_cycles`` is the independent check for the cycle-maximality
claim: it exhaustively enumerates every split of the walk into simple paths
and cycles and returns the best cycle count.  Keep it free of any code
shared with ``decompose``.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Sequence

from .errors import BrokenChain, EmptyWalk, KindMismatch, TooLong
from .model import (
    Component,
    ComponentKind,
    Decomposition,
    Occurrence,
    StateId,
    Walk,
    canonicalize_cycle,
)

_PATH = 0
_CYCLE = 1


def split_segments(vertices: Sequence[StateId]) -> list[tuple[int, list[StateId]]]:
    """Raw ordered segments of a walk, cycles still in traversal rotation.

    Returns (kind, vertices) pairs where cycle segments are closed and start
    at their entry vertex.  This is the single-pass buffer scan; callers
    normally want :func:`decompose`, which adds canonicalization and
    run-length encoding on top.
    """
    if not vertices:
        raise EmptyWalk("cannot split an empty walk")
    segments: list[tuple[int, list[StateId]]] = []
    first = vertices[0]
    buf: list[StateId] = [first]
    index: dict[StateId, int] = {first: 0}
    for u in vertices[1:]:
        i = index.get(u)
        if i is None:
            index[u] = len(buf)
            buf.append(u)
        else:
            if i > 0:
                segments.append((_PATH, buf[: i + 1]))
            segments.append((_CYCLE, buf[i:] + [u]))
            buf = [u]
            index = {u: 0}
    if len(buf) >= 2 or not segments:
        segments.append((_PATH, buf))
    return segments


def decompose(walk: Walk) -> Decomposition:
    """Decompose a walk into an ordered list of component occurrences.

    The result contains the maximal possible number of cycles, and
    :func:`reconstruct` applied to it returns the original vertex sequence
    exactly.  Consecutive identical cycles are merged into one occurrence
    with a repeat count.
    """
    segments = split_segments(walk.vertices)
    occurrences: list[Occurrence] = []
    components: dict[str, Component] = {}
    prev_cycle: list[StateId] | None = None
    for kind, seg in segments:
        if kind == _CYCLE and seg == prev_cycle:
            last = occurrences[-1]
            occurrences[-1] = replace(last, repeat_count=last.repeat_count + 1)
            continue
        if kind == _CYCLE:
            comp = canonicalize_cycle(seg)
            prev_cycle = seg
        else:
            comp = Component.simple_path(seg)
            prev_cycle = None
        components[comp.component_id] = comp
        occurrences.append(
            Occurrence(comp.component_id, seg[0], 1, len(occurrences))
        )
    return Decomposition(walk.drive_id, walk.app_id, tuple(occurrences), components)


def decompose_vertices(vertices: Sequence[StateId],
                       drive_id: str = "",
                       app_id: str = "") -> Decomposition:
    """Decompose a bare vertex sequence (teststand / CLI convenience)."""
    return decompose(Walk(drive_id, "", app_id, tuple(vertices)))


def reconstruct(decomposition: Decomposition) -> tuple[StateId, ...]:
    """Rebuild the original vertex sequence from a decomposition.

    Segments chain at shared junction vertices: the first segment emits all
    its vertices, every later segment (and every extra cycle repeat) emits
    its vertices minus the junction it shares with what came before.
    """
    out: list[StateId] = []
    expected_pos = 0
    for occ in decomposition.occurrences:
        if occ.position != expected_pos:
            raise BrokenChain(
                f"occurrence positions have a gap at {occ.position} "
                f"(expected {expected_pos})"
            )
        expected_pos += 1
        comp = decomposition.components.get(occ.component_id)
        if comp is None:
            raise BrokenChain(f"unresolved component {occ.component_id}")
        if comp.kind is ComponentKind.PATH and occ.repeat_count != 1:
            raise BrokenChain("path occurrences cannot repeat")
        seg = comp.rotation_from(occ.entry_vertex)
        for _ in range(occ.repeat_count):
            if not out:
                out.extend(seg)
            elif out[-1] != seg[0]:
                raise BrokenChain(
                    f"segment starting at {seg[0]!r} does not join previous "
                    f"segment ending at {out[-1]!r}"
                )
            else:
                out.extend(seg[1:])
    if not out:
        raise EmptyWalk("decomposition has no occurrences")
    return tuple(out)


def oracle_max_cycles(vertices: Sequence[StateId], *, max_edges: int = 14) -> int:
    """Exact maximum cycle count over all valid splits, by brute force.

    A valid split cuts the walk into contiguous segments that share their
    junction vertices, each segment a simple path or a cycle.  The search
    recurses over every admissible first segment; no segment can extend
    past the first revisited vertex, which bounds the enumeration.
    Intended as the independent verifier for ``decompose`` on short walks.
    """
    n = len(vertices)
    if n == 0:
        raise EmptyWalk("cannot split an empty walk")
    if n - 1 > max_edges:
        raise TooLong(f"walk has {n - 1} edges, oracle bound is {max_edges}")

    memo: dict[int, int] = {}

    def best(i: int) -> int:
        if i == n - 1:
            return 0
        hit = memo.get(i)
        if hit is not None:
            return hit
        start = vertices[i]
        seen = {start}
        result = -1
        for j in range(i + 1, n):
            v = vertices[j]
            if v in seen:
                # Only a closing revisit yields a cycle; either way no
                # segment from i extends past the first revisit.
                if v == start:
                    result = max(result, 1 + best(j))
                break
            result = max(result, best(j))  # simple path vertices[i..j]
            seen.add(v)
        memo[i] = result
        return result

    return best(0)


def is_subpath(p1: Component, p2: Component) -> bool:
    """True iff p1's edges appear contiguously, in order, inside p2.

    Containment in a simple path forces contiguity, so this reduces to a
    sliding-window match of vertex lists.  A zero-edge p1 degenerates to
    vertex membership.
    """
    if p1.kind is not ComponentKind.PATH or p2.kind is not ComponentKind.PATH:
        raise KindMismatch("is_subpath is defined for simple paths only")
    a, b = p1.vertices, p2.vertices
    if len(a) == 1:
        return a[0] in b
    if len(a) > len(b):
        return False
    return any(b[i : i + len(a)] == a for i in range(len(b) - len(a) + 1))
