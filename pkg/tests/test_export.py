import pytest

from walkcomp import ComponentStore, EmptyStore, Walk, export_graph_script

from fixtures import build_store


def _store(*walk_specs):
    walks = [Walk(f"d{i}", f"v{i}", "nav", tuple(spec.split(",")))
             for i, spec in enumerate(walk_specs)]
    return build_store(walks)


def lines_matching(script, *needles):
    return [line for line in script.splitlines()
            if all(n in line for n in needles)]


class TestVariant3:
    def test_single_path_smallest_case(self):
        script = export_graph_script(_store("S0,S1"), 3)
        assert len(lines_matching(script, "MERGE (:T {name: 'S0_S1'")) == 1
        assert len(lines_matching(script, "MERGE (:Paths {name:")) == 1
        assert len(lines_matching(script, "[:P {pos:")) == 1
        assert len(lines_matching(script, "[:C {pos:")) == 0

    def test_three_components_give_three_component_nodes(self):
        # one cycle and two simple paths, like the modeling example
        store = _store("S1,S2,S3,S1", "S0,S1,S2", "S2,S3,S4")
        script = export_graph_script(store, 3)
        nodes = lines_matching(script, "MERGE (:Paths {name:") + \
            lines_matching(script, "MERGE (:Circles {name:")
        assert len(nodes) == 3

    def test_transits_shared_across_components(self):
        # edge S1_S2 appears in a cycle and in a path, one transit node
        store = _store("S1,S2,S3,S1", "S0,S1,S2")
        script = export_graph_script(store, 3)
        assert len(lines_matching(script, "(:T {name: 'S1_S2'")) == 1

    def test_drive_attachment_keeps_entry_and_repeat(self):
        store = _store("S0,S1,S2,S3,S1,S2,S3,S1,S2,S3,S1,S2")
        script = export_graph_script(store, 3)
        has = lines_matching(script, "[:Has", "entry: 'S1'", "repeat: 3")
        assert len(has) == 1


class TestVariant2:
    def test_worked_example_duplicates_state_nodes(self):
        store = _store("S0,S1,S2,S3,S1,S2,S3,S1,S2,S3,S1,S2")
        script = export_graph_script(store, 2)
        state_nodes = lines_matching(script, "MERGE (:State {key:")
        # p_v + c_v for this decomposition: (2) + (3) + (2)
        assert len(state_nodes) == 7
        assert len(lines_matching(script, "name: 'S1'")) == 3  # one per component

    def test_component_edges_typed_by_kind(self):
        store = _store("S1,S2,S3,S1", "S0,S1")
        script = export_graph_script(store, 2)
        assert len(lines_matching(script, "[:Circle {compHash:")) == 3
        assert len(lines_matching(script, "[:Path {compHash:")) == 1

    def test_drives_attach_at_their_entry_state(self):
        store = _store("S0,S3,S1,S2,S3")
        script = export_graph_script(store, 2)
        # the cycle is entered at S3 = canonical open index 2 (S1,S2,S3)
        has = lines_matching(script, "[:Has")
        assert len(has) == 2  # one per occurrence: path + cycle
        assert any(":2'" in line for line in has)


class TestCommon:
    def test_empty_store_rejected(self):
        with pytest.raises(EmptyStore):
            export_graph_script(ComponentStore(), 3)

    def test_bad_variant_rejected(self):
        with pytest.raises(ValueError):
            export_graph_script(_store("A,B"), 1)

    def test_quotes_in_labels_are_escaped(self):
        store = _store("It's,B")
        script = export_graph_script(store, 3)
        assert "It\\'s" in script

    def test_one_statement_per_line_and_idempotent_creation(self):
        store = _store("S1,S2,S3,S1", "S0,S1")
        for variant in (2, 3):
            script = export_graph_script(store, variant)
            assert script.endswith("\n")
            for line in script.splitlines():
                assert line.startswith(("MERGE", "MATCH"))

    def test_hierarchy_statements_present(self):
        script = export_graph_script(_store("A,B"), 3)
        assert len(lines_matching(script, "MERGE (:Vehicle")) == 1
        assert len(lines_matching(script, "MERGE (:Drive")) == 1
        assert len(lines_matching(script, "[:Drove]")) == 1
