import io

import pytest

from walkcomp import (
    ComponentStore,
    InfeasibleParameters,
    decompose,
    generate_fsa,
    generate_walks,
    iter_walks,
    parse_events,
    sessionize,
)
from walkcomp.synth import (
    ConvergencePoint,
    convergence_csv,
    convergence_report,
    walks_to_events,
)
from walkcomp.ingest import events_to_jsonl


def distinct_components(walks):
    store = ComponentStore()
    for w in walks:
        store.insert(decompose(w), vehicle_id=w.vehicle_id)
    stats = store.statistics()
    return stats.n_distinct_cycles + stats.n_distinct_paths


class TestGenerateFsa:
    def test_maximum_edges_give_full_graph(self):
        fsa = generate_fsa(3, 9, seed=1)
        assert len(fsa.edges) == 9
        for state in fsa.states:
            assert len(fsa.out_neighbors[state]) == 3

    def test_seed_determinism(self):
        assert generate_fsa(10, 20, seed=7).edges == generate_fsa(10, 20, seed=7).edges
        assert generate_fsa(10, 20, seed=7).edges != generate_fsa(10, 20, seed=8).edges

    def test_too_few_edges_infeasible(self):
        with pytest.raises(InfeasibleParameters):
            generate_fsa(2, 0, seed=1)
        with pytest.raises(InfeasibleParameters):
            generate_fsa(5, 4, seed=1)

    def test_too_many_edges_infeasible(self):
        with pytest.raises(InfeasibleParameters):
            generate_fsa(3, 10, seed=1)

    def test_every_state_has_an_out_edge(self):
        fsa = generate_fsa(25, 25, seed=3)
        assert all(len(fsa.out_neighbors[s]) >= 1 for s in fsa.states)


class TestGenerateWalks:
    def test_walks_respect_fsa_edges(self):
        fsa = generate_fsa(12, 40, seed=2)
        edges = {(e.start, e.end) for e in fsa.edges}
        for walk in generate_walks(fsa, 50, reuse_skew=0.7, seed=2,
                                   mean_length=30):
            for a, b in zip(walk.vertices, walk.vertices[1:]):
                assert (a, b) in edges

    def test_seed_determinism(self):
        fsa = generate_fsa(10, 30, seed=4)
        a = generate_walks(fsa, 30, reuse_skew=0.5, seed=4)
        b = generate_walks(fsa, 30, reuse_skew=0.5, seed=4)
        assert a == b
        c = generate_walks(fsa, 30, reuse_skew=0.5, seed=5)
        assert a != c

    def test_uniform_skew_spreads_edge_choices(self):
        fsa = generate_fsa(4, 16, seed=6)  # full graph, out-degree 4
        counts = {}
        for walk in generate_walks(fsa, 60, reuse_skew=0.0, seed=6,
                                   mean_length=100, max_length=200):
            for a, b in zip(walk.vertices, walk.vertices[1:]):
                counts[(a, b)] = counts.get((a, b), 0) + 1
        total = sum(counts.values())
        assert len(counts) == 16
        for n in counts.values():  # loose tolerance around 1/16 each
            assert 0.3 / 16 < n / total < 3.0 / 16

    def test_skew_shrinks_distinct_component_pool(self):
        fsa = generate_fsa(20, 60, seed=9)
        skewed = distinct_components(
            generate_walks(fsa, 400, reuse_skew=0.9, seed=9))
        uniform = distinct_components(
            generate_walks(fsa, 400, reuse_skew=0.0, seed=9))
        assert skewed < uniform

    def test_length_distribution_mean_roughly_matches(self):
        fsa = generate_fsa(10, 30, seed=10)
        walks = generate_walks(fsa, 400, reuse_skew=0.0, seed=10,
                               mean_length=50, max_length=500)
        mean_edges = sum(len(w.vertices) - 1 for w in walks) / len(walks)
        assert 35 < mean_edges < 65

    def test_invalid_skew_rejected(self):
        fsa = generate_fsa(5, 10, seed=1)
        with pytest.raises(InfeasibleParameters):
            list(iter_walks(fsa, 1, reuse_skew=1.5, seed=1))


class TestWalksToEvents:
    def test_pipeline_round_trip(self):
        fsa = generate_fsa(8, 20, seed=12)
        walks = generate_walks(fsa, 20, reuse_skew=0.6, seed=12, mean_length=15)
        text = events_to_jsonl(walks_to_events(walks))
        report = parse_events(io.StringIO(text))
        assert not report.rejects
        rebuilt = sessionize(report.events)
        assert {w.drive_id: w.vertices for w in rebuilt} == \
            {w.drive_id: w.vertices for w in walks}


class TestConvergenceReport:
    def test_no_walks_gives_empty_table(self):
        assert convergence_report([]) == []

    def test_distinct_counts_monotone_and_final_row_present(self):
        fsa = generate_fsa(15, 45, seed=13)
        walks = generate_walks(fsa, 300, reuse_skew=0.8, seed=13, mean_length=20)
        points = convergence_report(walks, checkpoints=[50, 100, 200])
        assert [p.walks_ingested for p in points] == [50, 100, 200, 300]
        distinct = [p.distinct_components for p in points]
        assert distinct == sorted(distinct)

    def test_power_of_two_default_schedule(self):
        fsa = generate_fsa(10, 20, seed=14)
        walks = generate_walks(fsa, 10, reuse_skew=0.5, seed=14, mean_length=5)
        points = convergence_report(walks)
        assert [p.walks_ingested for p in points] == [1, 2, 4, 8, 10]

    def test_csv_emission(self):
        points = [ConvergencePoint(10, 5, 50, 0.1, 1234)]
        text = convergence_csv(points)
        lines = text.splitlines()
        assert lines[0] == "walks_ingested,distinct_components,ratio,stored_bytes"
        assert lines[1] == "10,5,0.100000,1234"

    def test_skewed_ratio_below_uniform_ratio(self):
        fsa = generate_fsa(20, 60, seed=15)
        skewed = convergence_report(
            generate_walks(fsa, 500, reuse_skew=0.9, seed=15, mean_length=30))
        uniform = convergence_report(
            generate_walks(fsa, 500, reuse_skew=0.0, seed=15, mean_length=30))
        assert skewed[-1].ratio < uniform[-1].ratio


class TestRegressionPins:
    def test_scaled_down_skew_workload_pins(self):
        """Seed-pinned regression of the skewed default workload at 2k walks."""
        fsa = generate_fsa(30, 90, seed=42)
        store = ComponentStore()
        points = convergence_report(
            iter_walks(fsa, 2000, reuse_skew=0.9, seed=42), store=store)
        final = points[-1]
        assert final.walks_ingested == 2000
        # frozen from the first run of this exact seed and configuration
        assert final.distinct_components == 1433
        assert final.occurrence_refs == 15644
        assert final.ratio == pytest.approx(0.0916, abs=1e-4)
