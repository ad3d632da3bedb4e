"""In-memory block workspace model.

A workspace is a forest of block stacks: every block has at most one parent
(via a value input, a statement input, or a ``next`` link), top-level blocks
carry a canvas position, and nested blocks do not. Shelves group whole
top-level stacks; the registry data lives here so a :class:`Workspace` is one
self-contained value, while shelf operations live in :mod:`blockshelf.shelves`.

Mutating operations bump ``Workspace.revision`` by exactly 1. Fresh ids come
from workspace-scoped counters ("b1", "b2", ... / "s1", "s2", ...) and freed
ids are never reused, so id assignment is deterministic for golden tests.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    AlreadyTopLevel,
    ChildNotTopLevel,
    CollapseOnNestedBlock,
    NotTopLevel,
    SlotOccupied,
    UnknownBlock,
    WouldCreateCycle,
)

BlockId = str
ShelfId = str

_NUMBERED_BLOCK_ID = re.compile(r"^b([0-9]+)$")
_NUMBERED_SHELF_ID = re.compile(r"^s([0-9]+)$")


@dataclass(frozen=True)
class Slot:
    """Connection point on a parent block: a named value input, a named
    statement input, or the ``next`` link of a stack."""

    kind: str  # "value" | "statement" | "next"
    name: str | None = None

    @classmethod
    def value(cls, name: str) -> Slot:
        return cls("value", name)

    @classmethod
    def statement(cls, name: str) -> Slot:
        return cls("statement", name)

    @classmethod
    def next(cls) -> Slot:
        return cls("next", None)


@dataclass
class Block:
    """One block instance.

    ``value_inputs`` / ``statement_inputs`` map input names to the connected
    child id; an entry may be ``None`` after a disconnect (the socket stays
    declared but empty). ``position`` is present exactly on top-level blocks.
    """

    id: BlockId
    block_type: str
    fields: dict[str, str] = field(default_factory=dict)
    value_inputs: dict[str, BlockId | None] = field(default_factory=dict)
    statement_inputs: dict[str, BlockId | None] = field(default_factory=dict)
    next: BlockId | None = None
    comment: str | None = None
    collapsed: bool = False
    disabled: bool = False
    position: tuple[int, int] | None = None

    def child_ids(self) -> list[BlockId]:
        """Connected children in slot order: values, statements, next."""
        out = [c for c in self.value_inputs.values() if c is not None]
        out += [c for c in self.statement_inputs.values() if c is not None]
        if self.next is not None:
            out.append(self.next)
        return out


@dataclass
class Shelf:
    """Named group of top-level stacks with a visibility flag."""

    id: ShelfId
    name: str
    members: list[BlockId] = field(default_factory=list)
    visible: bool = True


@dataclass
class ShelfRegistry:
    """Ordered shelf collection; member sets are pairwise disjoint."""

    shelves: dict[ShelfId, Shelf] = field(default_factory=dict)

    def __iter__(self):
        return iter(self.shelves.values())

    def __len__(self) -> int:
        return len(self.shelves)


@dataclass
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    message: str
    subject: BlockId | None = None


@dataclass
class Workspace:
    """The full block graph of one project screen plus its shelf registry."""

    blocks: dict[BlockId, Block] = field(default_factory=dict)
    top_level: list[BlockId] = field(default_factory=list)
    shelves: ShelfRegistry = field(default_factory=ShelfRegistry)
    revision: int = 0
    next_block_serial: int = 1
    next_shelf_serial: int = 1

    def block(self, block_id: BlockId) -> Block:
        try:
            return self.blocks[block_id]
        except KeyError:
            raise UnknownBlock(f"no block {block_id!r}", subject=block_id) from None

    def fresh_block_id(self) -> BlockId:
        while f"b{self.next_block_serial}" in self.blocks:
            self.next_block_serial += 1
        new_id = f"b{self.next_block_serial}"
        self.next_block_serial += 1
        return new_id

    def fresh_shelf_id(self) -> ShelfId:
        while f"s{self.next_shelf_serial}" in self.shelves.shelves:
            self.next_shelf_serial += 1
        new_id = f"s{self.next_shelf_serial}"
        self.next_shelf_serial += 1
        return new_id

    def note_existing_ids(self) -> None:
        """Advance the id counters past any numbered ids already present.

        Called after parsing a document so later fresh ids cannot collide.
        """
        for block_id in self.blocks:
            m = _NUMBERED_BLOCK_ID.match(block_id)
            if m:
                self.next_block_serial = max(self.next_block_serial, int(m.group(1)) + 1)
        for shelf_id in self.shelves.shelves:
            m = _NUMBERED_SHELF_ID.match(shelf_id)
            if m:
                self.next_shelf_serial = max(self.next_shelf_serial, int(m.group(1)) + 1)

    def bump(self) -> None:
        self.revision += 1


def new_workspace() -> Workspace:
    """Fresh empty workspace: no blocks, no shelves, revision 0."""
    return Workspace()


def add_block(
    ws: Workspace,
    block_type: str,
    fields: dict[str, str] | None = None,
    position: tuple[int, int] = (0, 0),
) -> BlockId:
    """Add a new top-level block and return its fresh id."""
    if not block_type:
        raise ValueError("block_type must be non-empty")
    block_id = ws.fresh_block_id()
    ws.blocks[block_id] = Block(
        id=block_id,
        block_type=block_type,
        fields=dict(fields or {}),
        position=(int(position[0]), int(position[1])),
    )
    ws.top_level.append(block_id)
    ws.bump()
    return block_id


def parent_of(ws: Workspace, block_id: BlockId) -> tuple[BlockId, Slot] | None:
    """The (parent id, slot) holding ``block_id``, or None for roots."""
    ws.block(block_id)
    for candidate in ws.blocks.values():
        for name, child in candidate.value_inputs.items():
            if child == block_id:
                return candidate.id, Slot.value(name)
        for name, child in candidate.statement_inputs.items():
            if child == block_id:
                return candidate.id, Slot.statement(name)
        if candidate.next == block_id:
            return candidate.id, Slot.next()
    return None


def subtree_ids(ws: Workspace, root: BlockId) -> list[BlockId]:
    """Pre-order ids of the stack rooted at ``root``: the block itself, then
    value children, statement children, then the ``next`` chain."""
    block = ws.block(root)
    out = [root]
    for child in block.value_inputs.values():
        if child is not None:
            out.extend(subtree_ids(ws, child))
    for child in block.statement_inputs.values():
        if child is not None:
            out.extend(subtree_ids(ws, child))
    if block.next is not None:
        out.extend(subtree_ids(ws, block.next))
    return out


def connect(ws: Workspace, parent: BlockId, slot: Slot, child: BlockId) -> None:
    """Attach a top-level ``child`` stack into ``slot`` of ``parent``."""
    parent_block = ws.block(parent)
    ws.block(child)
    if child not in ws.top_level:
        raise ChildNotTopLevel(f"{child!r} is not a top-level block", subject=child)
    if parent in subtree_ids(ws, child):
        raise WouldCreateCycle(
            f"connecting {child!r} under {parent!r} would create a cycle", subject=child
        )
    if slot.kind == "value":
        if parent_block.value_inputs.get(slot.name) is not None:
            raise SlotOccupied(f"value input {slot.name!r} of {parent!r} is occupied")
        parent_block.value_inputs[slot.name] = child
    elif slot.kind == "statement":
        if parent_block.statement_inputs.get(slot.name) is not None:
            raise SlotOccupied(f"statement input {slot.name!r} of {parent!r} is occupied")
        parent_block.statement_inputs[slot.name] = child
    elif slot.kind == "next":
        if parent_block.next is not None:
            raise SlotOccupied(f"next slot of {parent!r} is occupied")
        parent_block.next = child
    else:
        raise ValueError(f"unknown slot kind {slot.kind!r}")
    ws.top_level.remove(child)
    ws.blocks[child].position = None
    ws.bump()


def disconnect(ws: Workspace, child: BlockId, position: tuple[int, int]) -> None:
    """Detach ``child`` from its parent; it becomes a root at ``position``."""
    located = parent_of(ws, child)
    if located is None:
        raise AlreadyTopLevel(f"{child!r} is already top-level", subject=child)
    parent_id, slot = located
    parent_block = ws.blocks[parent_id]
    if slot.kind == "value":
        parent_block.value_inputs[slot.name] = None
    elif slot.kind == "statement":
        parent_block.statement_inputs[slot.name] = None
    else:
        parent_block.next = None
    ws.top_level.append(child)
    ws.blocks[child].position = (int(position[0]), int(position[1]))
    ws.bump()


def set_comment(ws: Workspace, block_id: BlockId, text: str | None) -> None:
    ws.block(block_id).comment = text
    ws.bump()


def set_collapsed(ws: Workspace, block_id: BlockId, flag: bool) -> None:
    """Collapse summarizes a whole stack, so only roots may be collapsed."""
    block = ws.block(block_id)
    if block_id not in ws.top_level:
        raise CollapseOnNestedBlock(
            f"{block_id!r} is nested; only top-level blocks collapse", subject=block_id
        )
    block.collapsed = bool(flag)
    ws.bump()


def set_disabled(ws: Workspace, block_id: BlockId, flag: bool) -> None:
    ws.block(block_id).disabled = bool(flag)
    ws.bump()


def effective_disabled(ws: Workspace, block_id: BlockId) -> bool:
    """A block is effectively disabled if it or any ancestor is disabled."""
    current: BlockId | None = block_id
    while current is not None:
        if ws.block(current).disabled:
            return True
        located = parent_of(ws, current)
        current = located[0] if located else None
    return False


def _copy_subtree(ws: Workspace, root: BlockId) -> dict[BlockId, BlockId]:
    """Deep-copy a stack with fresh ids; no revision bump, no position."""
    mapping: dict[BlockId, BlockId] = {}
    for old_id in subtree_ids(ws, root):
        mapping[old_id] = ws.fresh_block_id()
    for old_id, new_id in mapping.items():
        old = ws.blocks[old_id]
        ws.blocks[new_id] = Block(
            id=new_id,
            block_type=old.block_type,
            fields=dict(old.fields),
            value_inputs={n: (mapping[c] if c is not None else None) for n, c in old.value_inputs.items()},
            statement_inputs={n: (mapping[c] if c is not None else None) for n, c in old.statement_inputs.items()},
            next=mapping[old.next] if old.next is not None else None,
            comment=old.comment,
            collapsed=old.collapsed,
            disabled=old.disabled,
            position=None,
        )
    return mapping


def duplicate_subtree(
    ws: Workspace, root: BlockId, offset: tuple[int, int] = (24, 24)
) -> dict[BlockId, BlockId]:
    """Deep-copy the stack at ``root``; the copy becomes a new root at
    position+offset. Returns the old-id to new-id bijection."""
    block = ws.block(root)
    if root not in ws.top_level:
        raise NotTopLevel(f"{root!r} is not top-level", subject=root)
    mapping = _copy_subtree(ws, root)
    new_root = mapping[root]
    x, y = block.position or (0, 0)
    ws.blocks[new_root].position = (x + int(offset[0]), y + int(offset[1]))
    ws.top_level.append(new_root)
    ws.bump()
    return mapping


def block_count(ws: Workspace) -> int:
    """Total block count, nested blocks included."""
    return len(ws.blocks)


def block_count_in(ws: Workspace, root: BlockId) -> int:
    """Block count of the stack rooted at ``root``."""
    return len(subtree_ids(ws, root))


def _parent_counts(ws: Workspace) -> dict[BlockId, int]:
    counts = {block_id: 0 for block_id in ws.blocks}
    for block in ws.blocks.values():
        for child in block.child_ids():
            if child in counts:
                counts[child] += 1
    return counts


def validate(ws: Workspace) -> list[Diagnostic]:
    """Check every workspace invariant; returns [] iff the workspace is sound.

    Never mutates. Codes: dangling-ref, id-mismatch, multi-parent,
    top-level-mismatch, position-mismatch, unreachable, collapse-on-nested,
    shelf-member-not-root, shelf-overlap, duplicate-member, empty-name.
    """
    out: list[Diagnostic] = []

    def err(code: str, message: str, subject: BlockId | None = None) -> None:
        out.append(Diagnostic("error", code, message, subject))

    for block_id, block in ws.blocks.items():
        if block.id != block_id:
            err("id-mismatch", f"block keyed {block_id!r} carries id {block.id!r}", block_id)
        for name, child in list(block.value_inputs.items()) + list(block.statement_inputs.items()):
            if child is not None and child not in ws.blocks:
                err("dangling-ref", f"{block_id!r} input {name!r} references missing {child!r}", block_id)
        if block.next is not None and block.next not in ws.blocks:
            err("dangling-ref", f"{block_id!r} next references missing {block.next!r}", block_id)

    counts = _parent_counts(ws)
    top_set = set(ws.top_level)
    if len(top_set) != len(ws.top_level):
        err("top-level-mismatch", "top_level contains duplicates")
    for block_id in ws.top_level:
        if block_id not in ws.blocks:
            err("dangling-ref", f"top_level references missing {block_id!r}", block_id)
    for block_id, n in counts.items():
        if n > 1:
            err("multi-parent", f"{block_id!r} has {n} parents", block_id)
        if n == 0 and block_id not in top_set:
            err("top-level-mismatch", f"{block_id!r} has no parent but is not in top_level", block_id)
        if n >= 1 and block_id in top_set:
            err("top-level-mismatch", f"{block_id!r} has a parent but is in top_level", block_id)

    for block_id, block in ws.blocks.items():
        is_root = block_id in top_set
        if is_root and block.position is None:
            err("position-mismatch", f"root {block_id!r} lacks a position", block_id)
        if not is_root and block.position is not None:
            err("position-mismatch", f"nested {block_id!r} carries a position", block_id)
        if not is_root and block.collapsed:
            err("collapse-on-nested", f"nested {block_id!r} is collapsed", block_id)

    # Reachability: DFS from roots must visit every block exactly once.
    seen: set[BlockId] = set()
    for root in ws.top_level:
        if root not in ws.blocks:
            continue
        stack = [root]
        while stack:
            current = stack.pop()
            if current in seen:
                err("unreachable", f"{current!r} reached more than once", current)
                continue
            seen.add(current)
            stack.extend(c for c in ws.blocks[current].child_ids() if c in ws.blocks)
    for block_id in ws.blocks:
        if block_id not in seen:
            err("unreachable", f"{block_id!r} is not reachable from any root", block_id)

    claimed: dict[BlockId, ShelfId] = {}
    for shelf in ws.shelves:
        if not shelf.name:
            err("empty-name", f"shelf {shelf.id!r} has an empty name")
        member_set: set[BlockId] = set()
        for member in shelf.members:
            if member in member_set:
                err("duplicate-member", f"shelf {shelf.id!r} lists {member!r} twice", member)
            member_set.add(member)
            if member not in ws.blocks:
                err("dangling-ref", f"shelf {shelf.id!r} references missing {member!r}", member)
                continue
            if member not in top_set:
                err("shelf-member-not-root", f"shelf member {member!r} is not top-level", member)
            if member in claimed and claimed[member] != shelf.id:
                err("shelf-overlap", f"{member!r} belongs to both {claimed[member]!r} and {shelf.id!r}", member)
            claimed.setdefault(member, shelf.id)
    return out
