"""Independent oracles for the test suite.

Everything here recomputes facts from raw block data without going through
the engine's own bookkeeping (top_level lists, registry indexes, codegen
ordering), so tests compare two genuinely different routes to the same
answer.
"""

from __future__ import annotations

import copy

from blockshelf.model import Block, Workspace
from blockshelf.search import Query


def child_ids(block: Block) -> list[str]:
    out = [c for c in block.value_inputs.values() if c is not None]
    out += [c for c in block.statement_inputs.values() if c is not None]
    if block.next is not None:
        out.append(block.next)
    return out


def parent_counts(ws: Workspace) -> dict[str, int]:
    counts = {block_id: 0 for block_id in ws.blocks}
    for block in ws.blocks.values():
        for child in child_ids(block):
            counts[child] += 1
    return counts


def computed_roots(ws: Workspace) -> set[str]:
    """Roots derived purely from parent references, not from top_level."""
    return {block_id for block_id, n in parent_counts(ws).items() if n == 0}


def stack_ids(ws: Workspace, root: str) -> set[str]:
    """Members of the stack at ``root`` via plain DFS over raw block data."""
    seen: set[str] = set()
    stack = [root]
    while stack:
        current = stack.pop()
        if current in seen:
            raise AssertionError(f"cycle through {current!r}")
        seen.add(current)
        stack.extend(child_ids(ws.blocks[current]))
    return seen


def _normalize_block(block: Block) -> tuple:
    return (
        block.block_type,
        tuple(block.fields.items()),
        tuple((n, c) for n, c in block.value_inputs.items() if c is not None),
        tuple((n, c) for n, c in block.statement_inputs.items() if c is not None),
        block.next,
        block.comment,
        block.collapsed,
        block.disabled,
        block.position,
    )


def workspaces_equal(a: Workspace, b: Workspace) -> bool:
    """Deep structural equality ignoring revision and id counters.

    Empty input sockets (None entries) are normalized away: a declared-but-
    empty socket and an absent one mean the same workspace.
    """
    if a.top_level != b.top_level:
        return False
    if set(a.blocks) != set(b.blocks):
        return False
    for block_id in a.blocks:
        if _normalize_block(a.blocks[block_id]) != _normalize_block(b.blocks[block_id]):
            return False
    shelves_a = [(s.id, s.name, list(s.members), s.visible) for s in a.shelves]
    shelves_b = [(s.id, s.name, list(s.members), s.visible) for s in b.shelves]
    return shelves_a == shelves_b


def isomorphic(
    ws_a: Workspace,
    root_a: str,
    ws_b: Workspace,
    root_b: str,
    id_map: dict[str, str] | None = None,
) -> bool:
    """Recursive structural equality of two stacks modulo an id mapping and
    the root position. If ``id_map`` is given it must send a's ids to b's."""

    def walk(a_id: str, b_id: str, at_root: bool) -> bool:
        if id_map is not None and id_map.get(a_id) != b_id:
            return False
        a, b = ws_a.blocks[a_id], ws_b.blocks[b_id]
        if a.block_type != b.block_type or a.fields != b.fields:
            return False
        if (a.comment, a.collapsed, a.disabled) != (b.comment, b.collapsed, b.disabled):
            return False
        if not at_root and (a.position is not None or b.position is not None):
            return False
        a_values = [(n, c) for n, c in a.value_inputs.items() if c is not None]
        b_values = [(n, c) for n, c in b.value_inputs.items() if c is not None]
        if [n for n, _ in a_values] != [n for n, _ in b_values]:
            return False
        for (_, a_child), (_, b_child) in zip(a_values, b_values):
            if not walk(a_child, b_child, False):
                return False
        a_stmts = [(n, c) for n, c in a.statement_inputs.items() if c is not None]
        b_stmts = [(n, c) for n, c in b.statement_inputs.items() if c is not None]
        if [n for n, _ in a_stmts] != [n for n, _ in b_stmts]:
            return False
        for (_, a_child), (_, b_child) in zip(a_stmts, b_stmts):
            if not walk(a_child, b_child, False):
                return False
        if (a.next is None) != (b.next is None):
            return False
        if a.next is not None and not walk(a.next, b.next, False):
            return False
        return True

    return walk(root_a, root_b, True)


def brute_search_ids(ws: Workspace, query: Query) -> set[str]:
    """Exhaustive filter over every block; ignores ordering entirely."""
    shelf_members: dict[str, str] = {}
    for shelf in ws.shelves:
        for member in shelf.members:
            shelf_members[member] = shelf.id

    parent: dict[str, str] = {}
    for block in ws.blocks.values():
        for child in child_ids(block):
            parent[child] = block.id

    def root_of(block_id: str) -> str:
        current = block_id
        while current in parent:
            current = parent[current]
        return current

    out: set[str] = set()
    for block_id, block in ws.blocks.items():
        if query.comment_substring is not None:
            if block.comment is None or query.comment_substring.lower() not in block.comment.lower():
                continue
        if query.block_type is not None and block.block_type != query.block_type:
            continue
        if query.field_value is not None:
            name, value = query.field_value
            if block.fields.get(name) != value:
                continue
        if query.shelf is not None and shelf_members.get(root_of(block_id)) != query.shelf:
            continue
        out.add(block_id)
    return out


def delete_stacks(ws: Workspace, roots: list[str]) -> Workspace:
    """Copy of ``ws`` with the given stacks removed entirely (blocks, roots,
    and shelf memberships). Test-only: the engine has no delete operation."""
    out = copy.deepcopy(ws)
    doomed: set[str] = set()
    for root in roots:
        doomed |= stack_ids(out, root)
    for block_id in doomed:
        del out.blocks[block_id]
    out.top_level = [r for r in out.top_level if r not in doomed]
    for shelf in out.shelves:
        shelf.members = [m for m in shelf.members if m not in doomed]
    return out
