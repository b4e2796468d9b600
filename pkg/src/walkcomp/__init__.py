"""walkcomp: clickstream walks as deduplicated cycles and simple paths.

Sequences of application states are walks on the app's finite state
automaton.  This package splits each walk into simple paths and the
maximal number of cycles, stores the pieces once in a content-addressed
hierarchy (vehicle -> drive -> sequence -> components), and answers
behavioral queries directly on that compressed representation.
"""

from .decompose import (
    decompose,
    decompose_vertices,
    is_subpath,
    oracle_max_cycles,
    reconstruct,
)
from .errors import (
    BrokenChain,
    ConflictingMetadata,
    CorruptStore,
    DataError,
    DeadEnd,
    EmptyStore,
    EmptyWalk,
    InfeasibleParameters,
    KindMismatch,
    NotACycle,
    StoreError,
    TooLong,
    UnknownDrive,
    UnreadableInput,
    VersionMismatch,
    WalkcompError,
)
from .export import export_graph_script
from .ingest import LogEvent, ParseReport, parse_events, sessionize
from .model import (
    Component,
    ComponentKind,
    Decomposition,
    Occurrence,
    StateId,
    TransitEdge,
    Walk,
    canonicalize_cycle,
    component_hash,
)
from .queries import (
    MODE_ALL,
    MODE_CYCLES,
    CycleReport,
    PathQuery,
    cluster_by_components,
    find_drives_through_path,
    find_paths_between,
    find_repeated_cycles,
    jaccard_distance,
)
from .store import ComponentStore, InsertReport, StoreStatistics, load_or_empty
from .synth import (
    Fsa,
    WorkloadConfig,
    convergence_report,
    generate_fsa,
    generate_walks,
    iter_walks,
)

__version__ = "0.1.0"

__all__ = [
    "BrokenChain",
    "Component",
    "ComponentKind",
    "ComponentStore",
    "ConflictingMetadata",
    "CorruptStore",
    "CycleReport",
    "DataError",
    "DeadEnd",
    "Decomposition",
    "EmptyStore",
    "EmptyWalk",
    "Fsa",
    "InfeasibleParameters",
    "InsertReport",
    "KindMismatch",
    "LogEvent",
    "MODE_ALL",
    "MODE_CYCLES",
    "NotACycle",
    "Occurrence",
    "ParseReport",
    "PathQuery",
    "StateId",
    "StoreError",
    "StoreStatistics",
    "TooLong",
    "TransitEdge",
    "UnknownDrive",
    "UnreadableInput",
    "VersionMismatch",
    "Walk",
    "WalkcompError",
    "WorkloadConfig",
    "canonicalize_cycle",
    "cluster_by_components",
    "component_hash",
    "convergence_report",
    "decompose",
    "decompose_vertices",
    "export_graph_script",
    "find_drives_through_path",
    "find_paths_between",
    "find_repeated_cycles",
    "generate_fsa",
    "generate_walks",
    "is_subpath",
    "iter_walks",
    "jaccard_distance",
    "load_or_empty",
    "oracle_max_cycles",
    "parse_events",
    "reconstruct",
    "sessionize",
]
