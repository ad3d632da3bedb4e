"""Shelf operations: the user-defined grouping layer over a workspace.

A shelf owns whole top-level stacks, each root belongs to at most one shelf,
and re-shelving never touches block structure. Visibility and minimize are
presentation-only; activate/deactivate is the semantic switch (deactivated
stacks drop out of the generated program). Export produces a self-contained
document for cross-project re-use; import remaps every id fresh and renames
colliding procedure definitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import codegen
from .errors import (
    AlreadyShelved,
    AmbiguousShelf,
    EmptyName,
    MalformedDocument,
    NotAMember,
    NotTopLevel,
    UnknownShelf,
    UnsupportedVersion,
)
from .model import (
    Block,
    BlockId,
    Shelf,
    ShelfId,
    Workspace,
    _copy_subtree,
    block_count_in,
    subtree_ids,
)

EXPORT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ShelfStatus:
    """Aggregate presentation row for the ShelfBox listing.

    ``collapse_state`` / ``active_state`` summarize the member roots' flags:
    "all", "some" or "none" (an empty shelf reports "none" for both).
    """

    shelf: ShelfId
    name: str
    member_roots: int
    total_blocks: int
    visible: bool
    collapse_state: str
    active_state: str


@dataclass(frozen=True)
class UnresolvedRef:
    kind: str  # "procedure" | "variable" | "component"
    name: str


@dataclass
class ShelfExport:
    """Self-contained serialized shelf: member stacks plus the names they
    reference but do not define."""

    format_version: int
    shelf_name: str
    blocks: dict[BlockId, Block] = field(default_factory=dict)
    roots: list[BlockId] = field(default_factory=list)
    unresolved_refs: list[UnresolvedRef] = field(default_factory=list)


@dataclass
class ImportReport:
    id_map: dict[BlockId, BlockId] = field(default_factory=dict)
    renamed_procedures: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


def get_shelf(ws: Workspace, shelf_id: ShelfId) -> Shelf:
    try:
        return ws.shelves.shelves[shelf_id]
    except KeyError:
        raise UnknownShelf(f"no shelf {shelf_id!r}", subject=shelf_id) from None


def find_shelf(ws: Workspace, name_or_id: str) -> Shelf:
    """Resolve a shelf by id, else by unambiguous name."""
    if name_or_id in ws.shelves.shelves:
        return ws.shelves.shelves[name_or_id]
    named = [s for s in ws.shelves if s.name == name_or_id]
    if len(named) == 1:
        return named[0]
    if len(named) > 1:
        raise AmbiguousShelf(f"{name_or_id!r} names {len(named)} shelves; use the id")
    raise UnknownShelf(f"no shelf named {name_or_id!r}", subject=name_or_id)


def shelf_of(ws: Workspace, root: BlockId) -> ShelfId | None:
    """The shelf owning ``root``, or None for unshelved roots."""
    ws.block(root)
    for shelf in ws.shelves:
        if root in shelf.members:
            return shelf.id
    return None


def _require_root(ws: Workspace, block_id: BlockId) -> None:
    ws.block(block_id)
    if block_id not in ws.top_level:
        raise NotTopLevel(f"{block_id!r} is not top-level", subject=block_id)


def create_shelf(ws: Workspace, name: str, roots: list[BlockId] | None = None) -> ShelfId:
    """New visible shelf over the given unshelved roots.

    Duplicate shelf names are permitted; ids disambiguate.
    """
    if not name:
        raise EmptyName("shelf name must be non-empty")
    roots = list(roots or [])
    seen: set[BlockId] = set()
    for root in roots:
        _require_root(ws, root)
        if shelf_of(ws, root) is not None or root in seen:
            raise AlreadyShelved(f"{root!r} already belongs to a shelf", subject=root)
        seen.add(root)
    shelf_id = ws.fresh_shelf_id()
    ws.shelves.shelves[shelf_id] = Shelf(id=shelf_id, name=name, members=roots, visible=True)
    ws.bump()
    return shelf_id


def assign_to_shelf(ws: Workspace, shelf_id: ShelfId, roots: list[BlockId]) -> None:
    """Add unshelved roots to an existing shelf; structure untouched."""
    shelf = get_shelf(ws, shelf_id)
    for root in roots:
        _require_root(ws, root)
        if shelf_of(ws, root) is not None:
            raise AlreadyShelved(f"{root!r} already belongs to a shelf", subject=root)
    shelf.members.extend(roots)
    ws.bump()


def remove_from_shelf(ws: Workspace, shelf_id: ShelfId, roots: list[BlockId]) -> None:
    shelf = get_shelf(ws, shelf_id)
    for root in roots:
        _require_root(ws, root)
        if root not in shelf.members:
            raise NotAMember(f"{root!r} is not a member of {shelf_id!r}", subject=root)
    for root in roots:
        shelf.members.remove(root)
    ws.bump()


def set_shelf_visibility(ws: Workspace, shelf_id: ShelfId, visible: bool) -> None:
    """Presentation-only: member blocks and the compiled program are untouched."""
    get_shelf(ws, shelf_id).visible = bool(visible)
    ws.bump()


def visible_roots(ws: Workspace) -> list[BlockId]:
    """Top-level roots minus members of hidden shelves, in canvas order."""
    hidden: set[BlockId] = set()
    for shelf in ws.shelves:
        if not shelf.visible:
            hidden.update(shelf.members)
    return [root for root in ws.top_level if root not in hidden]


def minimize_shelf(ws: Workspace, shelf_id: ShelfId) -> None:
    """Collapse every member root; minimized stacks stay visible."""
    shelf = get_shelf(ws, shelf_id)
    for root in shelf.members:
        ws.blocks[root].collapsed = True
    ws.bump()


def maximize_shelf(ws: Workspace, shelf_id: ShelfId) -> None:
    shelf = get_shelf(ws, shelf_id)
    for root in shelf.members:
        ws.blocks[root].collapsed = False
    ws.bump()


def deactivate_shelf(ws: Workspace, shelf_id: ShelfId) -> None:
    """Disable every member root; nested blocks inherit effective-disabled."""
    shelf = get_shelf(ws, shelf_id)
    for root in shelf.members:
        ws.blocks[root].disabled = True
    ws.bump()


def activate_shelf(ws: Workspace, shelf_id: ShelfId) -> None:
    shelf = get_shelf(ws, shelf_id)
    for root in shelf.members:
        ws.blocks[root].disabled = False
    ws.bump()


def duplicate_shelf(
    ws: Workspace, shelf_id: ShelfId, offset: tuple[int, int] = (24, 24)
) -> ShelfId:
    """Deep-copy every member stack into a new shelf "Copy of <name>"."""
    shelf = get_shelf(ws, shelf_id)
    copies: list[BlockId] = []
    for root in shelf.members:
        mapping = _copy_subtree(ws, root)
        new_root = mapping[root]
        x, y = ws.blocks[root].position or (0, 0)
        ws.blocks[new_root].position = (x + int(offset[0]), y + int(offset[1]))
        ws.top_level.append(new_root)
        copies.append(new_root)
    new_id = ws.fresh_shelf_id()
    ws.shelves.shelves[new_id] = Shelf(
        id=new_id, name=f"Copy of {shelf.name}", members=copies, visible=True
    )
    ws.bump()
    return new_id


def compute_unresolved(blocks: dict[BlockId, Block]) -> list[UnresolvedRef]:
    """Names referenced but not defined inside the block collection."""
    defined, referenced = codegen.scan_references(blocks)
    return [UnresolvedRef(kind, name) for kind, name in sorted(referenced - defined)]


def export_shelf(ws: Workspace, shelf_id: ShelfId) -> ShelfExport:
    """Self-contained document of the member stacks. Pure: no revision bump."""
    shelf = get_shelf(ws, shelf_id)
    blocks: dict[BlockId, Block] = {}
    for root in shelf.members:
        for block_id in subtree_ids(ws, root):
            source = ws.blocks[block_id]
            blocks[block_id] = Block(
                id=source.id,
                block_type=source.block_type,
                fields=dict(source.fields),
                value_inputs=dict(source.value_inputs),
                statement_inputs=dict(source.statement_inputs),
                next=source.next,
                comment=source.comment,
                collapsed=source.collapsed,
                disabled=source.disabled,
                position=source.position,
            )
    return ShelfExport(
        format_version=EXPORT_FORMAT_VERSION,
        shelf_name=shelf.name,
        blocks=blocks,
        roots=list(shelf.members),
        unresolved_refs=compute_unresolved(blocks),
    )


def _check_document(doc: ShelfExport) -> None:
    """Reject documents with dangling internal references or a broken forest."""
    parents: dict[BlockId, int] = {block_id: 0 for block_id in doc.blocks}
    for block in doc.blocks.values():
        for child in block.child_ids():
            if child not in doc.blocks:
                raise MalformedDocument(f"document references missing block {child!r}")
            parents[child] += 1
    if any(n > 1 for n in parents.values()):
        raise MalformedDocument("document block has multiple parents")
    seen: set[BlockId] = set()
    for root in doc.roots:
        if root not in doc.blocks:
            raise MalformedDocument(f"document root {root!r} missing")
        if parents[root] != 0:
            raise MalformedDocument(f"document root {root!r} is nested")
        stack = [root]
        while stack:
            current = stack.pop()
            if current in seen:
                raise MalformedDocument("document contains a cycle or a shared block")
            seen.add(current)
            stack.extend(doc.blocks[current].child_ids())
    unreachable = set(doc.blocks) - seen
    if unreachable:
        raise MalformedDocument(
            f"document block {sorted(unreachable)[0]!r} unreachable from any root"
        )


def _supplied_names(ws: Workspace) -> set[tuple[str, str]]:
    """Names the target workspace can satisfy: its own definitions, plus
    component names it already references (the designer owns components, so a
    component referenced elsewhere in the project is assumed present)."""
    defined, referenced = codegen.scan_references(ws.blocks)
    return defined | {ref for ref in referenced if ref[0] == "component"}


def _free_procedure_name(base: str, taken: set[str]) -> str:
    n = 2
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"


def import_shelf(
    ws: Workspace, doc: ShelfExport, name_policy: str = "suffix"
) -> tuple[ShelfId, ImportReport]:
    """Insert a ShelfExport document as a new shelf.

    Every block id is remapped fresh. Under name_policy="suffix", imported
    procedure definitions whose names collide with existing ones get the
    smallest free numeric suffix and their in-document calls are retargeted.
    Unresolved references that the target cannot supply become warnings,
    never errors: the receiving project is expected to provide context.
    """
    if doc.format_version != EXPORT_FORMAT_VERSION:
        raise UnsupportedVersion(f"format_version {doc.format_version} not supported")
    if name_policy not in ("suffix", "keep"):
        raise ValueError(f"unknown name_policy {name_policy!r}")
    _check_document(doc)

    report = ImportReport()

    existing_defined, _ = codegen.scan_references(ws.blocks)
    existing_procs = {name for kind, name in existing_defined if kind == "procedure"}
    doc_defined, _ = codegen.scan_references(doc.blocks)
    doc_procs = {name for kind, name in doc_defined if kind == "procedure"}
    renames: dict[str, str] = {}
    if name_policy == "suffix":
        taken = set(existing_procs) | set(doc_procs)
        for name in sorted(doc_procs & existing_procs):
            replacement = _free_procedure_name(name, taken)
            taken.add(replacement)
            renames[name] = replacement
    report.renamed_procedures = renames

    id_map: dict[BlockId, BlockId] = {}
    for old_id in doc.blocks:
        id_map[old_id] = ws.fresh_block_id()
    report.id_map = id_map

    supplied = _supplied_names(ws)

    for old_id, old in doc.blocks.items():
        fields = dict(old.fields)
        if old.block_type in ("procedures_defnoreturn", "procedures_defreturn"):
            name = fields.get("NAME", "")
            if name in renames:
                fields["NAME"] = renames[name]
        elif old.block_type in ("procedures_callnoreturn", "procedures_callreturn"):
            name = fields.get("PROCNAME", "")
            if name in renames:
                fields["PROCNAME"] = renames[name]
        ws.blocks[id_map[old_id]] = Block(
            id=id_map[old_id],
            block_type=old.block_type,
            fields=fields,
            value_inputs={n: (id_map[c] if c is not None else None) for n, c in old.value_inputs.items()},
            statement_inputs={n: (id_map[c] if c is not None else None) for n, c in old.statement_inputs.items()},
            next=id_map[old.next] if old.next is not None else None,
            comment=old.comment,
            collapsed=old.collapsed,
            disabled=old.disabled,
            position=old.position if old.position is not None else None,
        )
    new_roots = [id_map[root] for root in doc.roots]
    for root in new_roots:
        if ws.blocks[root].position is None:
            ws.blocks[root].position = (0, 0)
    ws.top_level.extend(new_roots)

    shelf_name = doc.shelf_name
    if any(s.name == shelf_name for s in ws.shelves):
        shelf_name = f"{shelf_name} (imported)"
    shelf_id = ws.fresh_shelf_id()
    ws.shelves.shelves[shelf_id] = Shelf(
        id=shelf_id, name=shelf_name, members=new_roots, visible=True
    )

    for ref in compute_unresolved(doc.blocks):
        if (ref.kind, ref.name) not in supplied:
            report.warnings.append(f"unresolved {ref.kind} {ref.name!r}")
    ws.bump()
    return shelf_id, report


def shelf_status(ws: Workspace, shelf: Shelf) -> ShelfStatus:
    def summarize(flags: list[bool]) -> str:
        if flags and all(flags):
            return "all"
        if any(flags):
            return "some"
        return "none"

    return ShelfStatus(
        shelf=shelf.id,
        name=shelf.name,
        member_roots=len(shelf.members),
        total_blocks=sum(block_count_in(ws, root) for root in shelf.members),
        visible=shelf.visible,
        collapse_state=summarize([ws.blocks[r].collapsed for r in shelf.members]),
        active_state=summarize([not ws.blocks[r].disabled for r in shelf.members]),
    )


def shelf_box(ws: Workspace) -> list[ShelfStatus]:
    """One status row per shelf, in registry order. Pure."""
    return [shelf_status(ws, shelf) for shelf in ws.shelves]
