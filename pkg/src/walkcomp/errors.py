"""Exception hierarchy.

Two failure classes matter to callers (and to the CLI's exit codes):
``DataError`` for malformed or inconsistent input, ``StoreError`` for a
broken or incompatible persisted store.
"""


class WalkcompError(Exception):
    """Base class for all library errors."""


class DataError(WalkcompError):
    """Invalid input data or arguments (CLI exit code 3)."""


class StoreError(WalkcompError):
    """Persisted store unusable (CLI exit code 4)."""


class NotACycle(DataError):
    """Vertex list does not form a simple cycle."""


class EmptyWalk(DataError):
    """Walk has no vertices."""


class BrokenChain(DataError):
    """Decomposition segments do not chain at a shared junction vertex."""


class TooLong(DataError):
    """Walk exceeds the exhaustive oracle's edge bound."""


class KindMismatch(DataError):
    """Operation requires a different component kind."""


class ConflictingMetadata(DataError):
    """Same drive_id re-inserted with contradictory metadata or payload."""


class UnknownDrive(DataError):
    """Referenced drive_id is not in the store."""


class InfeasibleParameters(DataError):
    """Synthetic FSA parameters cannot produce a walkable graph."""


class DeadEnd(DataError):
    """Walk generation reached a state with no outgoing edge."""


class UnreadableInput(DataError):
    """Input stream could not be read or decoded."""


class CorruptStore(StoreError):
    """Store files missing, truncated, or failing checksum verification."""


class VersionMismatch(StoreError):
    """Store was written with an unsupported format version."""


class EmptyStore(StoreError):
    """Operation requires a non-empty store."""
