"""Block model: workspace construction, connections, flags, duplication,
validation. Structural facts are cross-checked against the raw-data oracles
in oracles.py rather than the engine's own bookkeeping."""

from __future__ import annotations

import copy
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from blockshelf import (
    Slot,
    add_block,
    block_count,
    block_count_in,
    connect,
    disconnect,
    duplicate_subtree,
    effective_disabled,
    new_workspace,
    serialize_workspace,
    set_collapsed,
    set_comment,
    set_disabled,
    validate,
)
from blockshelf.errors import (
    AlreadyTopLevel,
    ChildNotTopLevel,
    CollapseOnNestedBlock,
    NotTopLevel,
    SlotOccupied,
    UnknownBlock,
    WouldCreateCycle,
)
from builders import build_tutorial, random_edits, random_workspace


def test_new_workspace_is_empty():
    ws = new_workspace()
    assert block_count(ws) == 0
    assert len(ws.shelves) == 0
    assert ws.revision == 0
    assert serialize_workspace(ws) == b"<xml></xml>\n"


def test_add_block_field_round_trip():
    ws = new_workspace()
    block_id = add_block(ws, "math_number", {"NUM": "17"}, (10, 10))
    assert ws.blocks[block_id].fields["NUM"] == "17"
    assert ws.top_level == [block_id]
    assert ws.revision == 1


def test_197_sequential_adds():
    ws = new_workspace()
    for i in range(197):
        add_block(ws, "math_number", {"NUM": str(i)}, (i, i))
    assert block_count(ws) == 197
    assert ws.revision == 197


def test_add_block_requires_type():
    ws = new_workspace()
    with pytest.raises(ValueError):
        add_block(ws, "", {}, (0, 0))


def test_connect_removes_child_from_top_level():
    ws = new_workspace()
    plus = add_block(ws, "math_arithmetic", {"OP": "ADD"}, (0, 0))
    num = add_block(ws, "math_number", {"NUM": "1"}, (50, 0))
    connect(ws, plus, Slot.value("A"), num)
    assert num not in ws.top_level
    assert ws.blocks[num].position is None
    assert ws.blocks[plus].value_inputs["A"] == num


def test_connect_into_descendant_cycles():
    ws = new_workspace()
    a = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (0, 0))
    b = add_block(ws, "variables_set", {"VAR": "x"}, (0, 80))
    connect(ws, a, Slot.statement("DO"), b)
    c = add_block(ws, "variables_set", {"VAR": "y"}, (0, 160))
    connect(ws, b, Slot.next(), c)
    with pytest.raises(WouldCreateCycle):
        connect(ws, c, Slot.next(), a)
    # direct self-descendant case
    disconnect(ws, b, (0, 80))
    with pytest.raises(WouldCreateCycle):
        connect(ws, b, Slot.next(), b)


def test_connect_chain_leaves_single_root():
    ws = new_workspace()
    a = add_block(ws, "variables_set", {"VAR": "a"}, (0, 0))
    b = add_block(ws, "variables_set", {"VAR": "b"}, (0, 40))
    c = add_block(ws, "variables_set", {"VAR": "c"}, (0, 80))
    connect(ws, a, Slot.next(), b)
    connect(ws, b, Slot.next(), c)
    assert ws.top_level == [a]
    # reachability oracle: roots are exactly the never-referenced blocks
    assert oracles.computed_roots(ws) == {a}
    assert oracles.stack_ids(ws, a) == {a, b, c}


def test_connect_errors():
    ws = new_workspace()
    a = add_block(ws, "math_arithmetic", {"OP": "ADD"}, (0, 0))
    n1 = add_block(ws, "math_number", {"NUM": "1"}, (40, 0))
    n2 = add_block(ws, "math_number", {"NUM": "2"}, (80, 0))
    connect(ws, a, Slot.value("A"), n1)
    with pytest.raises(SlotOccupied):
        connect(ws, a, Slot.value("A"), n2)
    with pytest.raises(ChildNotTopLevel):
        connect(ws, a, Slot.value("B"), n1)
    with pytest.raises(UnknownBlock):
        connect(ws, "nope", Slot.value("A"), n2)
    with pytest.raises(UnknownBlock):
        connect(ws, a, Slot.value("B"), "nope")


def test_disconnect_reconnect_restores_structure():
    from blockshelf.model import parent_of

    ws = random_workspace(7, max_blocks=40)
    nested = [b for b in ws.blocks if b not in ws.top_level]
    assert nested, "seed must produce nested blocks"
    target = nested[0]
    before = copy.deepcopy(ws)
    parent, slot = parent_of(ws, target)
    disconnect(ws, target, (5, 5))
    assert target in ws.top_level
    connect(ws, parent, slot, target)
    assert oracles.workspaces_equal(before, ws)


def test_disconnect_moves_next_chain():
    ws = new_workspace()
    ev = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (0, 0))
    s1 = add_block(ws, "variables_set", {"VAR": "a"}, (0, 60))
    s2 = add_block(ws, "variables_set", {"VAR": "b"}, (0, 120))
    connect(ws, s1, Slot.next(), s2)
    connect(ws, ev, Slot.statement("DO"), s1)
    disconnect(ws, s1, (300, 300))
    # the whole chain moved: subtree-membership oracle
    assert oracles.stack_ids(ws, s1) == {s1, s2}
    assert oracles.stack_ids(ws, ev) == {ev}
    assert ws.blocks[s1].position == (300, 300)


def test_disconnect_root_rejected():
    ws = new_workspace()
    root = add_block(ws, "math_number", {"NUM": "1"}, (0, 0))
    with pytest.raises(AlreadyTopLevel):
        disconnect(ws, root, (0, 0))


def test_comment_is_searchable():
    from blockshelf import Query, search

    ws = new_workspace()
    root = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (0, 0))
    set_comment(ws, root, "score handler")
    matches = search(ws, Query(comment_substring="score"))
    assert [m.block for m in matches] == [root]


def test_set_collapsed_idempotent_but_revision_advances():
    ws = new_workspace()
    root = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (0, 0))
    rev = ws.revision
    set_collapsed(ws, root, True)
    set_collapsed(ws, root, True)
    assert ws.blocks[root].collapsed
    assert ws.revision == rev + 2


def test_collapse_nested_rejected():
    ws = new_workspace()
    ev = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (0, 0))
    inner = add_block(ws, "variables_set", {"VAR": "x"}, (0, 60))
    connect(ws, ev, Slot.statement("DO"), inner)
    with pytest.raises(CollapseOnNestedBlock):
        set_collapsed(ws, inner, True)


def test_disabled_root_drops_handler_from_codegen():
    from blockshelf import generate

    ws = new_workspace()
    keep = add_block(ws, "component_event", {"COMPONENT": "A", "EVENT": "Click"}, (0, 0))
    drop = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (0, 200))
    baseline = generate(ws)
    assert len(baseline.handler_keys) == 2
    set_disabled(ws, drop, True)
    after = generate(ws)
    assert [k for k in baseline.handler_keys if k not in after.handler_keys] == [
        f"component_event/B/Click/{drop}"
    ]
    assert keep in after.handler_keys[0]


def test_effective_disabled_inherits():
    ws = new_workspace()
    ev = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (0, 0))
    inner = add_block(ws, "variables_set", {"VAR": "x"}, (0, 60))
    connect(ws, ev, Slot.statement("DO"), inner)
    assert not effective_disabled(ws, inner)
    set_disabled(ws, ev, True)
    assert effective_disabled(ws, inner)
    assert not ws.blocks[inner].disabled  # own flag untouched


def test_duplicate_subtree_counts_and_bijection():
    ws = new_workspace()
    ev = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (10, 10))
    s1 = add_block(ws, "variables_set", {"VAR": "a"}, (0, 60))
    n1 = add_block(ws, "math_number", {"NUM": "4"}, (0, 90))
    connect(ws, s1, Slot.value("VALUE"), n1)
    connect(ws, ev, Slot.statement("DO"), s1)
    s2 = add_block(ws, "variables_set", {"VAR": "b"}, (0, 140))
    connect(ws, s1, Slot.next(), s2)
    extra = add_block(ws, "math_number", {"NUM": "9"}, (0, 180))
    connect(ws, s2, Slot.value("VALUE"), extra)
    before_ids = set(ws.blocks)
    assert block_count(ws) == 5

    mapping = duplicate_subtree(ws, ev, (7, 11))
    assert block_count(ws) == 10
    # total bijection, fresh range
    assert set(mapping) == before_ids
    assert len(set(mapping.values())) == len(mapping)
    assert set(mapping.values()) & before_ids == set()
    # copy is isomorphic under the returned mapping
    assert oracles.isomorphic(ws, ev, ws, mapping[ev], mapping)
    assert ws.blocks[mapping[ev]].position == (17, 21)


def test_duplicate_subtree_requires_root():
    ws = new_workspace()
    ev = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (0, 0))
    inner = add_block(ws, "variables_set", {"VAR": "x"}, (0, 60))
    connect(ws, ev, Slot.statement("DO"), inner)
    with pytest.raises(NotTopLevel):
        duplicate_subtree(ws, inner, (0, 0))
    with pytest.raises(UnknownBlock):
        duplicate_subtree(ws, "nope", (0, 0))


def test_validate_fresh_and_constructed_violation():
    ws = new_workspace()
    assert validate(ws) == []
    root = add_block(ws, "variables_set", {"VAR": "x"}, (0, 0))
    ws.blocks[root].next = "ghost"  # hand-built dangling reference
    diags = validate(ws)
    assert [d.code for d in diags] == ["dangling-ref"]
    assert diags[0].severity == "error"


def test_validate_is_pure(pusheen):
    before = copy.deepcopy(pusheen)
    rev = pusheen.revision
    assert validate(pusheen) == []
    assert pusheen.revision == rev
    assert oracles.workspaces_equal(before, pusheen)


def test_block_count_oracle(tutorial):
    assert block_count(tutorial) == 197
    total = sum(len(oracles.stack_ids(tutorial, r)) for r in tutorial.top_level)
    assert block_count(tutorial) == total
    first = tutorial.top_level[0]
    assert block_count_in(tutorial, first) == len(oracles.stack_ids(tutorial, first))
    with pytest.raises(UnknownBlock):
        block_count_in(tutorial, "nope")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_random_workspaces_satisfy_invariants(seed):
    ws = random_workspace(seed, max_blocks=80)
    assert validate(ws) == []
    # tree shape: parent counts in {0,1}; 0 iff top-level
    counts = oracles.parent_counts(ws)
    for block_id, n in counts.items():
        assert n in (0, 1)
        assert (n == 0) == (block_id in ws.top_level)
    # id uniqueness is structural (dict keys) but key/id agreement is not
    assert all(ws.blocks[i].id == i for i in ws.blocks)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 10**6))
def test_random_edit_sequences_stay_valid(seed, edit_seed):
    ws = random_workspace(seed, max_blocks=40)
    random_edits(ws, random.Random(edit_seed), steps=30)
    assert validate(ws) == []


def test_revision_counts_each_mutation():
    from blockshelf import create_shelf, duplicate_shelf, minimize_shelf

    ws = new_workspace()
    a = add_block(ws, "component_event", {"COMPONENT": "B", "EVENT": "Click"}, (0, 0))
    b = add_block(ws, "variables_set", {"VAR": "x"}, (0, 60))
    assert ws.revision == 2
    connect(ws, a, Slot.statement("DO"), b)
    assert ws.revision == 3
    disconnect(ws, b, (0, 60))
    assert ws.revision == 4
    set_comment(ws, a, "hello")
    set_collapsed(ws, a, True)
    set_disabled(ws, b, True)
    assert ws.revision == 7
    duplicate_subtree(ws, a, (4, 4))
    assert ws.revision == 8
    shelf = create_shelf(ws, "S", [a])
    assert ws.revision == 9
    # composite shelf ops also bump exactly once
    minimize_shelf(ws, shelf)
    assert ws.revision == 10
    duplicate_shelf(ws, shelf)
    assert ws.revision == 11
