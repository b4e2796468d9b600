"""Graph-database bulk-import script generation.

Two layouts are emitted as plain text, one Cypher-style statement per line:

* variant 2: every component gets its own duplicated state nodes, connected
  by ``Path`` / ``Circle`` relationships carrying the component id; drives
  attach to the state node the drive entered at.
* variant 3: each distinct FSA edge becomes one shared ``T`` transit node;
  components are single ``Paths`` / ``Circles`` nodes related to their
  transits; drives attach to the component node.

Shared nodes (vehicles, drives, transits, component nodes) and all
relationships use MERGE so a script can be re-applied idempotently; only
the per-component duplicated state nodes of variant 2 use CREATE-like MERGE
on a key unique to the component.
"""

from __future__ import annotations

from .errors import EmptyStore
from .model import ComponentKind
from .store import ComponentStore


def cypher_str(value: str) -> str:
    return "'" + value.replace("\\", "\\\\").replace("'", "\\'") + "'"


def export_graph_script(store: ComponentStore, variant: int) -> str:
    """Render the whole store as a creation script for the given variant."""
    if variant not in (2, 3):
        raise ValueError(f"variant must be 2 or 3, got {variant}")
    if not store.components:
        raise EmptyStore("nothing to export")
    lines = _hierarchy_lines(store)
    if variant == 2:
        lines += _variant2_lines(store)
    else:
        lines += _variant3_lines(store)
    return "\n".join(lines) + "\n"


def _hierarchy_lines(store: ComponentStore) -> list[str]:
    lines = []
    for vid in sorted(store.vehicles):
        lines.append("MERGE (:Vehicle {name: %s})" % cypher_str(vid))
    for did in sorted(store.drives):
        drive = store.drives[did]
        lines.append("MERGE (:Drive {name: %s})" % cypher_str(did))
        lines.append(
            "MATCH (v:Vehicle {name: %s}) MATCH (d:Drive {name: %s}) "
            "MERGE (v)-[:Drove]->(d)"
            % (cypher_str(drive.vehicle_id), cypher_str(did))
        )
    return lines


def _variant2_lines(store: ComponentStore) -> list[str]:
    lines = []
    node_key = lambda cid, i: f"{cid}:{i}"
    for cid in sorted(store.components):
        comp = store.components[cid]
        opened = comp.open_vertices
        rel = "Circle" if comp.kind is ComponentKind.CYCLE else "Path"
        for i, vertex in enumerate(opened):
            lines.append(
                "MERGE (:State {key: %s, name: %s, compHash: %s})"
                % (cypher_str(node_key(cid, i)), cypher_str(vertex), cypher_str(cid))
            )
        n = len(opened)
        edge_pairs = [(i, i + 1) for i in range(n - 1)]
        if comp.kind is ComponentKind.CYCLE:
            edge_pairs.append((n - 1, 0))
        for pos, (i, j) in enumerate(edge_pairs):
            lines.append(
                "MATCH (a:State {key: %s}) MATCH (b:State {key: %s}) "
                "MERGE (a)-[:%s {compHash: %s, pos: %d}]->(b)"
                % (cypher_str(node_key(cid, i)), cypher_str(node_key(cid, j)),
                   rel, cypher_str(cid), pos)
            )
    for drive_id, app_id, occurrences in sorted(
            store.iter_sequences(), key=lambda t: (t[0], t[1])):
        for occ in occurrences:
            comp = store.components[occ.component_id]
            entry_idx = comp.open_vertices.index(occ.entry_vertex)
            lines.append(
                "MATCH (d:Drive {name: %s}) MATCH (s:State {key: %s}) "
                "MERGE (d)-[:Has {app: %s, pos: %d, repeat: %d}]->(s)"
                % (cypher_str(drive_id),
                   cypher_str(node_key(occ.component_id, entry_idx)),
                   cypher_str(app_id), occ.position, occ.repeat_count)
            )
    return lines


def _variant3_lines(store: ComponentStore) -> list[str]:
    lines = []
    transits = sorted(
        {edge for comp in store.components.values() for edge in comp.edges()},
        key=lambda e: (e.start, e.end),
    )
    for edge in transits:
        lines.append(
            "MERGE (:T {name: %s, start: %s, end: %s})"
            % (cypher_str(f"{edge.start}_{edge.end}"),
               cypher_str(edge.start), cypher_str(edge.end))
        )
    for cid in sorted(store.components):
        comp = store.components[cid]
        if comp.kind is ComponentKind.CYCLE:
            label, rel = "Circles", "C"
        else:
            label, rel = "Paths", "P"
        lines.append(
            "MERGE (:%s {name: %s, length: %d})" % (label, cypher_str(cid),
                                                    comp.edge_count)
        )
        for pos, edge in enumerate(comp.edges()):
            lines.append(
                "MATCH (c:%s {name: %s}) MATCH (t:T {name: %s}) "
                "MERGE (c)-[:%s {pos: %d}]->(t)"
                % (label, cypher_str(cid),
                   cypher_str(f"{edge.start}_{edge.end}"), rel, pos)
            )
    for drive_id, app_id, occurrences in sorted(
            store.iter_sequences(), key=lambda t: (t[0], t[1])):
        for occ in occurrences:
            comp = store.components[occ.component_id]
            label = "Circles" if comp.kind is ComponentKind.CYCLE else "Paths"
            lines.append(
                "MATCH (d:Drive {name: %s}) MATCH (c:%s {name: %s}) "
                "MERGE (d)-[:Has {app: %s, pos: %d, entry: %s, repeat: %d}]->(c)"
                % (cypher_str(drive_id), label, cypher_str(occ.component_id),
                   cypher_str(app_id), occ.position,
                   cypher_str(occ.entry_vertex), occ.repeat_count)
            )
    return lines
