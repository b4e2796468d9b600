"""Content-addressed, deduplicating component store.

Holds the hierarchy vehicle -> drive -> (app) sequence -> component
occurrences.  Components are stored once, keyed by their content id, and
sequences reference them; a shared transit-edge index makes edge lookups
cheap.  Persistence is a directory of line-delimited files plus a manifest
with checksums; writes go through atomic file replacement.

Concurrency: one writer at a time (inserts serialize on an internal lock),
readers see a consistent store because read accessors take the same lock
for the duration of a call.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from types import MappingProxyType
from typing import Iterator, Mapping

from .errors import (
    BrokenChain,
    ConflictingMetadata,
    CorruptStore,
    VersionMismatch,
)
from .model import (
    Component,
    ComponentKind,
    Decomposition,
    Occurrence,
    StateId,
    TransitEdge,
    component_hash,
)

FORMAT_VERSION = 1

COMPONENTS_FILE = "components.jsonl"
OCCURRENCES_FILE = "occurrences.jsonl"
HIERARCHY_FILE = "hierarchy.jsonl"
MANIFEST_FILE = "manifest.json"


@dataclass
class VehicleRecord:
    vehicle_id: str
    attrs: dict = field(default_factory=dict)


@dataclass
class DriveRecord:
    drive_id: str
    vehicle_id: str
    start_time: datetime | None = None
    end_time: datetime | None = None
    attrs: dict = field(default_factory=dict)


@dataclass(frozen=True)
class InsertReport:
    """What one insert changed: component dedup counts and whether the
    (drive, app) sequence was actually added (False on idempotent re-insert)."""

    new_components: int
    reused_components: int
    sequence_added: bool


@dataclass(frozen=True)
class StoreStatistics:
    n_sequences: int
    n_distinct_cycles: int
    n_distinct_paths: int
    cycle_edges_total: int
    cycle_vertices_total: int
    path_edges_total: int
    path_vertices_total: int
    n_states: int
    n_transits: int
    raw_bytes: int
    stored_bytes: int
    compression_ratio: float


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


class ComponentStore:
    """In-memory store with JSONL persistence; see module docstring."""

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._components: dict[str, Component] = {}
        self._open_label_bytes: dict[str, int] = {}
        self._occurrence_index: dict[str, set[tuple[str, str]]] = {}
        self._edge_index: dict[TransitEdge, set[str]] = {}
        self._cycle_entries: dict[str, set[StateId]] = {}
        self._sequences: dict[tuple[str, str], tuple[Occurrence, ...]] = {}
        self._drive_apps: dict[str, set[str]] = {}
        self._drives: dict[str, DriveRecord] = {}
        self._vehicles: dict[str, VehicleRecord] = {}
        self._states: set[StateId] = set()
        self._raw_bytes = 0
        self._occurrence_refs = 0
        # running component aggregates, maintained on every table add
        self._n_cycles = 0
        self._n_paths = 0
        self._cycle_edges = 0
        self._cycle_vertices = 0
        self._path_edges = 0
        self._path_vertices = 0

    # -- write path ---------------------------------------------------------

    def insert(
        self,
        decomposition: Decomposition,
        *,
        vehicle_id: str,
        vehicle_attrs: dict | None = None,
        drive_attrs: dict | None = None,
        drive_start: datetime | None = None,
        drive_end: datetime | None = None,
    ) -> InsertReport:
        """Insert one decomposed sequence plus its hierarchy metadata.

        Components already present are reused by id; re-inserting the same
        (drive, app) sequence with an identical payload is a no-op, with a
        different payload it raises ConflictingMetadata, as does the same
        drive arriving under a different vehicle.
        """
        drive_id, app_id = decomposition.drive_id, decomposition.app_id
        occurrences, raw_len = self._validated(decomposition)
        with self._lock:
            existing_drive = self._drives.get(drive_id)
            if existing_drive is not None and existing_drive.vehicle_id != vehicle_id:
                raise ConflictingMetadata(
                    f"drive {drive_id!r} already belongs to vehicle "
                    f"{existing_drive.vehicle_id!r}, got {vehicle_id!r}"
                )
            key = (drive_id, app_id)
            stored = self._sequences.get(key)
            if stored is not None:
                if stored != occurrences:
                    raise ConflictingMetadata(
                        f"sequence {key!r} re-inserted with a different decomposition"
                    )
                self._merge_hierarchy(drive_id, vehicle_id, vehicle_attrs,
                                      drive_attrs, drive_start, drive_end)
                return InsertReport(0, 0, sequence_added=False)

            new = reused = 0
            counted: set[str] = set()
            canonical: list[Occurrence] = []
            for occ in occurrences:
                comp = decomposition.components[occ.component_id]
                table_comp = self._components.get(comp.component_id)
                if table_comp is None:
                    self._add_component(comp)
                    table_comp = comp
                    new += 1
                    counted.add(comp.component_id)
                elif comp.component_id not in counted:
                    reused += 1
                    counted.add(comp.component_id)
                cid = table_comp.component_id  # share the table's id string
                canonical.append(
                    Occurrence(cid, occ.entry_vertex, occ.repeat_count, occ.position)
                )
                self._occurrence_index.setdefault(cid, set()).add(key)
                if table_comp.kind is ComponentKind.CYCLE:
                    self._cycle_entries.setdefault(cid, set()).add(occ.entry_vertex)

            self._sequences[key] = tuple(canonical)
            self._drive_apps.setdefault(drive_id, set()).add(app_id)
            self._occurrence_refs += len(canonical)
            self._raw_bytes += raw_len
            self._merge_hierarchy(drive_id, vehicle_id, vehicle_attrs,
                                  drive_attrs, drive_start, drive_end)
            return InsertReport(new, reused, sequence_added=True)

    def _validated(self, d: Decomposition) -> tuple[tuple[Occurrence, ...], int]:
        """Check chain/position invariants and compute the sequence's raw
        serialized length (labels + separators) without materializing it."""
        if not d.occurrences:
            raise BrokenChain("decomposition has no occurrences")
        prev_exit: StateId | None = None
        total_vertices = 1
        total_bytes = 0
        for pos, occ in enumerate(d.occurrences):
            if occ.position != pos:
                raise BrokenChain(f"occurrence positions not 0..n-1 at {occ.position}")
            if occ.repeat_count < 1:
                raise BrokenChain("repeat_count must be >= 1")
            comp = d.components.get(occ.component_id)
            if comp is None:
                raise BrokenChain(f"unresolved component {occ.component_id}")
            opened = comp.open_vertices
            if occ.entry_vertex not in opened:
                raise BrokenChain(
                    f"entry {occ.entry_vertex!r} not in component {occ.component_id}"
                )
            if comp.kind is ComponentKind.PATH:
                if occ.entry_vertex != opened[0]:
                    raise BrokenChain("path entry must be its first vertex")
                if occ.repeat_count != 1:
                    raise BrokenChain("path occurrences cannot repeat")
                exit_vertex = opened[-1]
            else:
                exit_vertex = occ.entry_vertex
            if prev_exit is None:
                total_bytes += len(occ.entry_vertex.encode("utf-8"))
            elif prev_exit != occ.entry_vertex:
                raise BrokenChain(
                    f"segment at position {pos} enters at {occ.entry_vertex!r} "
                    f"but previous segment exits at {prev_exit!r}"
                )
            prev_exit = exit_vertex
            open_bytes = sum(len(v.encode("utf-8")) for v in opened)
            if comp.kind is ComponentKind.CYCLE:
                per_rep_v, per_rep_b = len(opened), open_bytes
            else:
                per_rep_v = len(opened) - 1
                per_rep_b = open_bytes - len(opened[0].encode("utf-8"))
            total_vertices += per_rep_v * occ.repeat_count
            total_bytes += per_rep_b * occ.repeat_count
        # raw form is label,label,...,label\n
        return d.occurrences, total_bytes + total_vertices

    def _add_component(self, comp: Component) -> None:
        cid = comp.component_id
        self._components[cid] = comp
        self._open_label_bytes[cid] = sum(
            len(v.encode("utf-8")) for v in comp.open_vertices
        )
        self._states.update(comp.open_vertices)
        for edge in comp.edges():
            self._edge_index.setdefault(edge, set()).add(cid)
        if comp.kind is ComponentKind.CYCLE:
            self._n_cycles += 1
            self._cycle_edges += comp.edge_count
            self._cycle_vertices += comp.vertex_count
        else:
            self._n_paths += 1
            self._path_edges += comp.edge_count
            self._path_vertices += comp.vertex_count

    def _merge_hierarchy(self, drive_id, vehicle_id, vehicle_attrs,
                         drive_attrs, drive_start, drive_end) -> None:
        vehicle = self._vehicles.setdefault(vehicle_id, VehicleRecord(vehicle_id))
        if vehicle_attrs:
            vehicle.attrs.update(vehicle_attrs)
        drive = self._drives.get(drive_id)
        if drive is None:
            drive = DriveRecord(drive_id, vehicle_id)
            self._drives[drive_id] = drive
        if drive_attrs:
            drive.attrs.update(drive_attrs)
        if drive_start is not None:
            drive.start_time = (drive_start if drive.start_time is None
                                else min(drive.start_time, drive_start))
        if drive_end is not None:
            drive.end_time = (drive_end if drive.end_time is None
                              else max(drive.end_time, drive_end))

    # -- read path ----------------------------------------------------------

    @property
    def components(self) -> Mapping[str, Component]:
        return MappingProxyType(self._components)

    @property
    def known_states(self) -> frozenset[StateId]:
        with self._lock:
            return frozenset(self._states)

    @property
    def n_occurrence_refs(self) -> int:
        return self._occurrence_refs

    def component(self, component_id: str) -> Component | None:
        return self._components.get(component_id)

    def component_ids_with_edge(self, edge: TransitEdge) -> frozenset[str]:
        with self._lock:
            return frozenset(self._edge_index.get(edge, ()))

    def sequences_for_component(self, component_id: str) -> frozenset[tuple[str, str]]:
        with self._lock:
            return frozenset(self._occurrence_index.get(component_id, ()))

    def cycle_entries(self, component_id: str) -> frozenset[StateId]:
        with self._lock:
            return frozenset(self._cycle_entries.get(component_id, ()))

    def iter_sequences(self) -> Iterator[tuple[str, str, tuple[Occurrence, ...]]]:
        with self._lock:
            items = list(self._sequences.items())
        for (drive_id, app_id), occurrences in items:
            yield drive_id, app_id, occurrences

    def decomposition_for(self, drive_id: str, app_id: str) -> Decomposition | None:
        with self._lock:
            occurrences = self._sequences.get((drive_id, app_id))
        if occurrences is None:
            return None
        return Decomposition(drive_id, app_id, occurrences, self.components)

    def apps_of_drive(self, drive_id: str) -> frozenset[str]:
        with self._lock:
            return frozenset(self._drive_apps.get(drive_id, ()))

    def component_ids_of_drive(self, drive_id: str,
                               kind: ComponentKind | None = None) -> frozenset[str]:
        """Distinct component ids across all of the drive's sequences."""
        with self._lock:
            ids: set[str] = set()
            for app_id in self._drive_apps.get(drive_id, ()):
                for occ in self._sequences[(drive_id, app_id)]:
                    if kind is None or self._components[occ.component_id].kind is kind:
                        ids.add(occ.component_id)
            return frozenset(ids)

    @property
    def drive_ids(self) -> tuple[str, ...]:
        with self._lock:
            return tuple(sorted(self._drives))

    def has_drive(self, drive_id: str) -> bool:
        return drive_id in self._drives

    def drive(self, drive_id: str) -> DriveRecord | None:
        return self._drives.get(drive_id)

    @property
    def vehicles(self) -> Mapping[str, VehicleRecord]:
        return MappingProxyType(self._vehicles)

    @property
    def drives(self) -> Mapping[str, DriveRecord]:
        return MappingProxyType(self._drives)

    def statistics(self) -> StoreStatistics:
        with self._lock:
            payloads = self._payloads()
            stored = (sum(len(b) for b in payloads.values())
                      + len(self._manifest_bytes(payloads)))
            raw = self._raw_bytes
            ratio = raw / stored if raw > 0 and stored > 0 else 0.0
            return StoreStatistics(
                n_sequences=len(self._sequences),
                n_distinct_cycles=self._n_cycles,
                n_distinct_paths=self._n_paths,
                cycle_edges_total=self._cycle_edges,
                cycle_vertices_total=self._cycle_vertices,
                path_edges_total=self._path_edges,
                path_vertices_total=self._path_vertices,
                n_states=len(self._states),
                n_transits=len(self._edge_index),
                raw_bytes=raw,
                stored_bytes=stored,
                compression_ratio=ratio,
            )

    # -- persistence --------------------------------------------------------

    def _payloads(self) -> dict[str, bytes]:
        """Serialized data files, deterministically ordered."""
        comp_lines = []
        for cid in sorted(self._components):
            comp = self._components[cid]
            comp_lines.append(_dumps(
                {"id": cid, "kind": comp.kind.value, "vertices": list(comp.vertices)}
            ))
        occ_lines = []
        for (drive_id, app_id) in sorted(self._sequences):
            occs = [
                {"cid": o.component_id, "entry": o.entry_vertex,
                 "repeat": o.repeat_count, "pos": o.position}
                for o in self._sequences[(drive_id, app_id)]
            ]
            occ_lines.append(_dumps(
                {"drive_id": drive_id, "app_id": app_id, "occ": occs}
            ))
        hier_lines = []
        for drive_id in sorted(self._drives):
            drive = self._drives[drive_id]
            drive_attrs = dict(drive.attrs)
            if drive.start_time is not None:
                drive_attrs["start_time"] = drive.start_time.isoformat()
            if drive.end_time is not None:
                drive_attrs["end_time"] = drive.end_time.isoformat()
            vehicle = self._vehicles[drive.vehicle_id]
            hier_lines.append(_dumps({
                "vehicle_id": drive.vehicle_id,
                "drive_id": drive_id,
                "attrs": {"drive": drive_attrs, "vehicle": dict(vehicle.attrs)},
            }))

        def encode(lines: list[str]) -> bytes:
            return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""

        return {
            COMPONENTS_FILE: encode(comp_lines),
            OCCURRENCES_FILE: encode(occ_lines),
            HIERARCHY_FILE: encode(hier_lines),
        }

    def _manifest_bytes(self, payloads: dict[str, bytes] | None = None) -> bytes:
        payloads = payloads if payloads is not None else self._payloads()
        manifest = {"format_version": FORMAT_VERSION, "files": {}}
        for name, payload in payloads.items():
            manifest["files"][name] = {
                "sha256": hashlib.sha256(payload).hexdigest(),
                "bytes": len(payload),
            }
        return (json.dumps(manifest, indent=1) + "\n").encode("utf-8")

    def persist(self, path: str | os.PathLike) -> None:
        """Write the store to a directory, atomically per file."""
        with self._lock:
            payloads = self._payloads()
            manifest = self._manifest_bytes(payloads)
        root = Path(path)
        root.mkdir(parents=True, exist_ok=True)
        for name, payload in payloads.items():
            _atomic_write(root / name, payload)
        _atomic_write(root / MANIFEST_FILE, manifest)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ComponentStore":
        """Read a persisted store, verifying version and checksums."""
        root = Path(path)
        manifest_path = root / MANIFEST_FILE
        if not manifest_path.is_file():
            raise CorruptStore(f"no manifest at {manifest_path}")
        try:
            manifest = json.loads(manifest_path.read_text("utf-8"))
        except (OSError, ValueError) as exc:
            raise CorruptStore(f"unreadable manifest: {exc}") from exc
        version = manifest.get("format_version")
        if version != FORMAT_VERSION:
            raise VersionMismatch(
                f"store format {version!r} unsupported (expected {FORMAT_VERSION})"
            )
        payloads: dict[str, bytes] = {}
        for name in (COMPONENTS_FILE, OCCURRENCES_FILE, HIERARCHY_FILE):
            entry = manifest.get("files", {}).get(name)
            if entry is None:
                raise CorruptStore(f"manifest lists no checksum for {name}")
            try:
                data = (root / name).read_bytes()
            except FileNotFoundError:
                data = b""
            if hashlib.sha256(data).hexdigest() != entry.get("sha256"):
                raise CorruptStore(f"checksum mismatch for {name}")
            payloads[name] = data
        store = cls()
        store._load_payloads(payloads)
        return store

    def _load_payloads(self, payloads: dict[str, bytes]) -> None:
        for lineno, record in _jsonl_records(payloads[COMPONENTS_FILE], COMPONENTS_FILE):
            try:
                kind = ComponentKind(record["kind"])
                vertices = tuple(record["vertices"])
                cid = record["id"]
            except (KeyError, ValueError, TypeError) as exc:
                raise CorruptStore(
                    f"{COMPONENTS_FILE}:{lineno}: bad component record: {exc}"
                ) from exc
            if component_hash(kind, vertices) != cid:
                raise CorruptStore(
                    f"{COMPONENTS_FILE}:{lineno}: content hash does not match id {cid}"
                )
            self._add_component(Component(kind, vertices, cid))

        for lineno, record in _jsonl_records(payloads[HIERARCHY_FILE], HIERARCHY_FILE):
            try:
                vehicle_id = record["vehicle_id"]
                drive_id = record["drive_id"]
                attrs = record.get("attrs", {})
                drive_attrs = dict(attrs.get("drive", {}))
                vehicle_attrs = dict(attrs.get("vehicle", {}))
            except (KeyError, TypeError, AttributeError) as exc:
                raise CorruptStore(
                    f"{HIERARCHY_FILE}:{lineno}: bad hierarchy record: {exc}"
                ) from exc
            start = _parse_instant(drive_attrs.pop("start_time", None))
            end = _parse_instant(drive_attrs.pop("end_time", None))
            self._merge_hierarchy(drive_id, vehicle_id, vehicle_attrs,
                                  drive_attrs, start, end)

        for lineno, record in _jsonl_records(payloads[OCCURRENCES_FILE], OCCURRENCES_FILE):
            try:
                drive_id = record["drive_id"]
                app_id = record["app_id"]
                occurrences = tuple(
                    Occurrence(o["cid"], o["entry"], o["repeat"], o["pos"])
                    for o in record["occ"]
                )
            except (KeyError, TypeError) as exc:
                raise CorruptStore(
                    f"{OCCURRENCES_FILE}:{lineno}: bad occurrence record: {exc}"
                ) from exc
            if drive_id not in self._drives:
                raise CorruptStore(
                    f"{OCCURRENCES_FILE}:{lineno}: sequence references unknown "
                    f"drive {drive_id!r}"
                )
            d = Decomposition(drive_id, app_id, occurrences, self._components)
            try:
                occs, raw_len = self._validated(d)
            except BrokenChain as exc:
                raise CorruptStore(f"{OCCURRENCES_FILE}:{lineno}: {exc}") from exc
            key = (drive_id, app_id)
            self._sequences[key] = occs
            self._drive_apps.setdefault(drive_id, set()).add(app_id)
            self._occurrence_refs += len(occs)
            self._raw_bytes += raw_len
            for occ in occs:
                self._occurrence_index.setdefault(occ.component_id, set()).add(key)
                if self._components[occ.component_id].kind is ComponentKind.CYCLE:
                    self._cycle_entries.setdefault(occ.component_id, set()).add(
                        occ.entry_vertex
                    )


def load_or_empty(path: str | os.PathLike) -> ComponentStore:
    """Load a store, or return a fresh empty one if nothing exists there."""
    if not (Path(path) / MANIFEST_FILE).is_file():
        return ComponentStore()
    return ComponentStore.load(path)


def _atomic_write(target: Path, payload: bytes) -> None:
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, target)


def _jsonl_records(payload: bytes, name: str):
    for lineno, line in enumerate(payload.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except ValueError as exc:
            raise CorruptStore(f"{name}:{lineno}: invalid JSON: {exc}") from exc


def _parse_instant(value: str | None) -> datetime | None:
    if value is None:
        return None
    try:
        return datetime.fromisoformat(value)
    except ValueError as exc:
        raise CorruptStore(f"bad timestamp {value!r} in hierarchy") from exc
