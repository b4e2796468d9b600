"""Hand-built walk corpora with known component counts.

Each builder returns a list of walks whose decompositions were worked out
by hand; tests assert against those counts, so keep the walks stable.
"""

from __future__ import annotations

from walkcomp import ComponentStore, Walk, decompose


def build_store(walks, store=None) -> ComponentStore:
    store = store if store is not None else ComponentStore()
    for walk in walks:
        store.insert(decompose(walk), vehicle_id=walk.vehicle_id)
    return store


def naive_drives_through(walks, states) -> list[str]:
    """Independent oracle: contiguous subsequence search over raw walks."""
    states = tuple(states)
    m = len(states)
    hits = set()
    for walk in walks:
        verts = walk.vertices
        for i in range(len(verts) - m + 1):
            if verts[i : i + m] == states:
                hits.add(walk.drive_id)
                break
    return sorted(hits)


def _walk(drive: str, vertices: str, app: str = "nav", vehicle: str | None = None) -> Walk:
    verts = tuple(vertices.split(","))
    return Walk(drive, vehicle or f"veh_{drive}", app, verts)


def planted_run_walks() -> tuple[list[Walk], list[str], int]:
    """Ten drives; the run X1,X2,X3 is planted in six of them, spread over
    four distinct simple-path components (d01/d02 and d03/d04 share one
    component each).  Returns (walks, expected drive ids, expected
    distinct matching components)."""
    walks = [
        _walk("d01", "X0,X1,X2,X3,X4"),
        _walk("d02", "X0,X1,X2,X3,X4"),      # same component as d01
        _walk("d03", "X1,X2,X3,X5"),
        _walk("d04", "X1,X2,X3,X5"),         # same component as d03
        _walk("d05", "X6,X1,X2,X3"),
        _walk("d06", "X7,X1,X2,X3,X8"),
        # no contiguous X1,X2,X3 below
        _walk("d07", "X1,X2,X4"),
        _walk("d08", "X2,X3,X1"),
        _walk("d09", "X3,X2,X1"),
        _walk("d10", "X0,X4,X5"),
    ]
    return walks, ["d01", "d02", "d03", "d04", "d05", "d06"], 4


def between_states_walks() -> tuple[list[Walk], str, str]:
    """Eight distinct simple paths visiting QA before QB, one reversed
    path, one cycle through both; mirrors the 8-vs-9 order discrepancy."""
    walks = [
        _walk(f"e{i:02d}", f"QA,F{i},QB") for i in range(1, 9)
    ]
    walks.append(_walk("e09", "QB,G1,QA"))       # reversed order
    walks.append(_walk("e10", "QA,M1,QB,QA"))    # cycle entered at QA
    return walks, "QA", "QB"


def stuck_cycle_walks() -> tuple[list[Walk], int, int]:
    """Sixteen drives traversing one 6-edge cycle twice in a row, plus two
    path-only noise drives.  Returns (walks, cycle edge count, n drives)."""
    loop = "Y1,Y2,Y3,Y4,Y5,Y6,Y1,Y2,Y3,Y4,Y5,Y6,Y1"
    walks = [_walk(f"c{i:02d}", loop) for i in range(1, 17)]
    walks.append(_walk("c90", "Y7,Y8,Y9"))
    walks.append(_walk("c91", "Y1,Y2,Y3"))
    return walks, 6, 16


def cluster_walks() -> list[Walk]:
    """{g1,g2} share components {path(Z1,Z2), cycle(Z2,Z4,Z2)}; {g3,g4,g5}
    share {path(Z1,Z2)}; g6 is unique."""
    shared_two = "Z1,Z2,Z4,Z2"   # path (Z1,Z2) + cycle (Z2,Z4,Z2)
    return [
        _walk("g1", shared_two),
        _walk("g2", shared_two),
        _walk("g3", "Z1,Z2"),
        _walk("g4", "Z1,Z2"),
        _walk("g5", "Z1,Z2"),
        _walk("g6", "Z8,Z9"),
    ]


def mixed_corpus() -> list[Walk]:
    """Union of the query fixtures; used for idempotence / order tests."""
    walks, _, _ = planted_run_walks()
    more, _, _ = between_states_walks()
    loops, _, _ = stuck_cycle_walks()
    return walks + more + loops + cluster_walks()
