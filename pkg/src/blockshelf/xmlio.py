"""Workspace and shelf-export document I/O.

The on-disk dialect is Blockly-compatible in shape: a root ``<xml>`` element
holding ``<block>`` trees (document order = canvas order) plus a trailing
``<shelves>`` section; shelf exports use a ``<shelfexport>`` root. Parsing is
strict: unknown elements or attributes are rejected with code "unknown-node"
(a lenient mode downgrades exactly those to warnings and drops the nodes),
and every structural invariant violation gets its own error code so silent
data loss is impossible.

Serialization is canonical and bit-exact:

* 2-space indentation, UTF-8, LF line endings, trailing newline;
* block attributes in the order type, id, x, y, collapsed, disabled, with
  boolean attributes present only when true;
* block children in the order fields, value inputs, statement inputs,
  comment, next;
* shelves last, members in shelf order; hidden shelves carry hidden="true";
* every element closed explicitly (the empty document is ``<xml></xml>``).

``serialize . parse`` is therefore the identity on canonical documents, and
``parse . serialize`` preserves workspace structure exactly (revision is
session state and is not serialized).
"""

from __future__ import annotations

import os
import tempfile
import xml.parsers.expat
from dataclasses import dataclass, field

from .errors import InvalidWorkspace, ParseError, UnsupportedVersion
from .model import Block, BlockId, Shelf, Workspace, validate
from .shelves import EXPORT_FORMAT_VERSION, ShelfExport, UnresolvedRef, _check_document

WORKSPACE_EXTENSION = ".bshelf.xml"
EXPORT_EXTENSION = ".shelfexport.xml"


def write_file_atomic(path: str, data: bytes) -> None:
    """Write via a sibling temp file and atomic rename; never truncates the
    target on failure."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".blockshelf-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        os.unlink(tmp_path)
        raise

# element -> child elements it may contain
_ALLOWED_CHILDREN = {
    "xml": {"block", "shelves"},
    "block": {"field", "value", "statement", "comment", "next"},
    "value": {"block"},
    "statement": {"block"},
    "next": {"block"},
    "shelves": {"shelf"},
    "shelf": {"member"},
    "member": set(),
    "field": set(),
    "comment": set(),
    "shelfexport": {"unresolved", "block"},
    "unresolved": {"ref"},
    "ref": set(),
}
_TEXT_BEARING = {"field", "comment"}
_REF_KINDS = ("procedure", "variable", "component")


@dataclass
class _Node:
    tag: str
    attrs: list[tuple[str, str]]
    line: int
    column: int
    children: list[_Node] = field(default_factory=list)
    text: str = ""

    def fail(self, code: str, message: str) -> ParseError:
        return ParseError(message, line=self.line, column=self.column, code=code)


class _TreeBuilder:
    """Expat wrapper producing a positioned element tree."""

    def __init__(self) -> None:
        self.root: _Node | None = None
        self.stack: list[_Node] = []
        self.parser = xml.parsers.expat.ParserCreate()
        self.parser.ordered_attributes = True
        self.parser.StartElementHandler = self._start
        self.parser.EndElementHandler = self._end
        self.parser.CharacterDataHandler = self._chars
        self.parser.StartDoctypeDeclHandler = self._doctype

    def parse(self, data: bytes) -> _Node:
        try:
            self.parser.Parse(data, True)
        except xml.parsers.expat.ExpatError as exc:
            raise ParseError(
                xml.parsers.expat.errors.messages[exc.code],
                line=exc.lineno,
                column=exc.offset + 1,
                code="malformed-xml",
            ) from None
        assert self.root is not None
        return self.root

    def _position(self) -> tuple[int, int]:
        return self.parser.CurrentLineNumber, self.parser.CurrentColumnNumber + 1

    def _start(self, tag: str, attr_list: list[str]) -> None:
        line, column = self._position()
        attrs = list(zip(attr_list[0::2], attr_list[1::2]))
        node = _Node(tag=tag, attrs=attrs, line=line, column=column)
        if self.stack:
            self.stack[-1].children.append(node)
        else:
            self.root = node
        self.stack.append(node)

    def _end(self, tag: str) -> None:
        self.stack.pop()

    def _chars(self, data: str) -> None:
        if self.stack:
            self.stack[-1].text += data

    def _doctype(self, *args) -> None:
        line, column = self._position()
        raise ParseError(
            "document type declarations are not allowed",
            line=line,
            column=column,
            code="unknown-node",
        )


def _to_bytes(data: bytes | str) -> bytes:
    return data.encode("utf-8") if isinstance(data, str) else data


class _DocumentReader:
    """Shared strict-walk machinery for both document kinds."""

    def __init__(self, lenient: bool, warnings: list[str] | None):
        self.lenient = lenient
        self.warnings = warnings if warnings is not None else []
        self.blocks: dict[BlockId, Block] = {}
        self.roots: list[BlockId] = []

    def warn_or_fail(self, node: _Node, message: str) -> bool:
        """unknown-node handling: True means "dropped, keep going"."""
        if self.lenient:
            self.warnings.append(f"{node.line}:{node.column}: dropped {message}")
            return True
        raise node.fail("unknown-node", message)

    def filter_children(self, node: _Node) -> list[_Node]:
        kept = []
        for child in node.children:
            if child.tag not in _ALLOWED_CHILDREN.get(node.tag, set()):
                self.warn_or_fail(child, f"unexpected element <{child.tag}> in <{node.tag}>")
                continue
            kept.append(child)
        if node.tag not in _TEXT_BEARING and node.text.strip():
            raise node.fail("unexpected-text", f"<{node.tag}> must not contain text")
        return kept

    def take_attrs(self, node: _Node, known: tuple[str, ...]) -> dict[str, str]:
        out: dict[str, str] = {}
        for name, value in node.attrs:
            if name not in known:
                self.warn_or_fail(node, f"unexpected attribute {name!r} on <{node.tag}>")
                continue
            out[name] = value
        return out

    def require_attr(self, node: _Node, attrs: dict[str, str], name: str) -> str:
        if name not in attrs:
            raise node.fail("missing-attr", f"<{node.tag}> requires attribute {name!r}")
        return attrs[name]

    def int_attr(self, node: _Node, attrs: dict[str, str], name: str) -> int:
        raw = self.require_attr(node, attrs, name)
        try:
            return int(raw, 10)
        except ValueError:
            raise node.fail("bad-attr", f"attribute {name!r} must be an integer, got {raw!r}") from None

    def bool_attr(self, node: _Node, attrs: dict[str, str], name: str) -> bool:
        raw = attrs.get(name)
        if raw is None:
            return False
        if raw == "true":
            return True
        if raw == "false":
            return False
        raise node.fail("bad-attr", f"attribute {name!r} must be true or false, got {raw!r}")

    def read_block(self, node: _Node, nested: bool) -> BlockId:
        attrs = self.take_attrs(node, ("type", "id", "x", "y", "collapsed", "disabled"))
        block_type = self.require_attr(node, attrs, "type")
        if not block_type:
            raise node.fail("bad-attr", "block type must be non-empty")
        block_id = self.require_attr(node, attrs, "id")
        if not block_id:
            raise node.fail("bad-attr", "block id must be non-empty")
        if block_id in self.blocks:
            raise node.fail("duplicate-id", f"block id {block_id!r} already used")

        if nested:
            if "x" in attrs or "y" in attrs:
                raise node.fail("position-on-nested", f"nested block {block_id!r} carries x/y")
            position = None
        else:
            position = (self.int_attr(node, attrs, "x"), self.int_attr(node, attrs, "y"))
        collapsed = self.bool_attr(node, attrs, "collapsed")
        if collapsed and nested:
            raise node.fail("collapse-on-nested", f"nested block {block_id!r} is collapsed")
        disabled = self.bool_attr(node, attrs, "disabled")

        block = Block(
            id=block_id,
            block_type=block_type,
            collapsed=collapsed,
            disabled=disabled,
            position=position,
        )
        self.blocks[block_id] = block

        for child in self.filter_children(node):
            if child.tag == "field":
                field_attrs = self.take_attrs(child, ("name",))
                name = self.require_attr(child, field_attrs, "name")
                if name in block.fields:
                    raise child.fail("duplicate-field", f"field {name!r} appears twice")
                if child.children:
                    self.warn_or_fail(child.children[0], "element inside <field>")
                block.fields[name] = child.text
            elif child.tag in ("value", "statement"):
                input_attrs = self.take_attrs(child, ("name",))
                name = self.require_attr(child, input_attrs, "name")
                target = block.value_inputs if child.tag == "value" else block.statement_inputs
                if name in target:
                    raise child.fail("duplicate-input", f"{child.tag} input {name!r} appears twice")
                target[name] = self.read_single_child(child)
            elif child.tag == "comment":
                if block.comment is not None:
                    raise child.fail("duplicate-child", "block has two comments")
                if child.children:
                    self.warn_or_fail(child.children[0], "element inside <comment>")
                block.comment = child.text
            elif child.tag == "next":
                if block.next is not None:
                    raise child.fail("duplicate-child", "block has two next links")
                block.next = self.read_single_child(child)
        return block_id

    def read_single_child(self, node: _Node) -> BlockId:
        children = self.filter_children(node)
        if not children:
            raise node.fail("missing-child", f"<{node.tag}> requires one block child")
        if len(children) > 1:
            raise children[1].fail("duplicate-child", f"<{node.tag}> holds more than one block")
        return self.read_block(children[0], nested=True)


def parse_workspace(
    data: bytes | str, *, lenient: bool = False, warnings: list[str] | None = None
) -> Workspace:
    """Parse a workspace document; the result satisfies every model invariant.

    Strict by default: any element or attribute outside the dialect is a
    ParseError with code "unknown-node". With ``lenient=True`` those are
    appended to ``warnings`` and the nodes dropped instead.
    """
    root = _TreeBuilder().parse(_to_bytes(data))
    if root.tag != "xml":
        raise root.fail("unknown-node", f"expected <xml> document root, got <{root.tag}>")
    reader = _DocumentReader(lenient, warnings)
    reader.take_attrs(root, ())

    shelves_nodes: list[_Node] = []
    block_nodes: list[_Node] = []
    for child in reader.filter_children(root):
        if child.tag == "shelves":
            if shelves_nodes:
                raise child.fail("duplicate-child", "document has two <shelves> sections")
            shelves_nodes.append(child)
        else:
            block_nodes.append(child)

    ws = Workspace()
    for node in block_nodes:
        root_id = reader.read_block(node, nested=False)
        ws.top_level.append(root_id)
    ws.blocks = reader.blocks

    if shelves_nodes:
        shelves_node = shelves_nodes[0]
        reader.take_attrs(shelves_node, ())
        claimed: set[BlockId] = set()
        for shelf_node in reader.filter_children(shelves_node):
            attrs = reader.take_attrs(shelf_node, ("id", "name", "hidden"))
            shelf_id = reader.require_attr(shelf_node, attrs, "id")
            if shelf_id in ws.shelves.shelves:
                raise shelf_node.fail("duplicate-shelf-id", f"shelf id {shelf_id!r} already used")
            name = reader.require_attr(shelf_node, attrs, "name")
            if not name:
                raise shelf_node.fail("empty-name", "shelf name must be non-empty")
            hidden = reader.bool_attr(shelf_node, attrs, "hidden")
            members: list[BlockId] = []
            for member_node in reader.filter_children(shelf_node):
                member_attrs = reader.take_attrs(member_node, ("id",))
                member = reader.require_attr(member_node, member_attrs, "id")
                if member not in ws.blocks:
                    raise member_node.fail("dangling-ref", f"shelf member {member!r} does not exist")
                if member not in ws.top_level:
                    raise member_node.fail(
                        "shelf-member-not-root", f"shelf member {member!r} is not a top-level block"
                    )
                if member in members:
                    raise member_node.fail("duplicate-member", f"member {member!r} listed twice")
                if member in claimed:
                    raise member_node.fail("shelf-overlap", f"{member!r} already belongs to a shelf")
                members.append(member)
                claimed.add(member)
            ws.shelves.shelves[shelf_id] = Shelf(
                id=shelf_id, name=name, members=members, visible=not hidden
            )

    ws.note_existing_ids()
    return ws


def parse_shelf_export(
    data: bytes | str, *, lenient: bool = False, warnings: list[str] | None = None
) -> ShelfExport:
    """Parse a shelf-export document (same strictness rules as workspaces)."""
    root = _TreeBuilder().parse(_to_bytes(data))
    if root.tag != "shelfexport":
        raise root.fail("unknown-node", f"expected <shelfexport> document root, got <{root.tag}>")
    reader = _DocumentReader(lenient, warnings)
    attrs = reader.take_attrs(root, ("version", "name"))
    version = reader.int_attr(root, attrs, "version")
    if version != EXPORT_FORMAT_VERSION:
        raise UnsupportedVersion(f"export format version {version} not supported")
    name = reader.require_attr(root, attrs, "name")
    if not name:
        raise root.fail("empty-name", "shelf name must be non-empty")

    unresolved: list[UnresolvedRef] = []
    unresolved_seen = False
    for child in reader.filter_children(root):
        if child.tag == "unresolved":
            if unresolved_seen:
                raise child.fail("duplicate-child", "document has two <unresolved> sections")
            unresolved_seen = True
            reader.take_attrs(child, ())
            for ref_node in reader.filter_children(child):
                ref_attrs = reader.take_attrs(ref_node, ("kind", "name"))
                kind = reader.require_attr(ref_node, ref_attrs, "kind")
                if kind not in _REF_KINDS:
                    raise ref_node.fail("bad-attr", f"unknown reference kind {kind!r}")
                ref_name = reader.require_attr(ref_node, ref_attrs, "name")
                if not ref_name:
                    raise ref_node.fail("bad-attr", "reference name must be non-empty")
                unresolved.append(UnresolvedRef(kind, ref_name))
        else:
            reader.roots.append(reader.read_block(child, nested=False))

    return ShelfExport(
        format_version=version,
        shelf_name=name,
        blocks=reader.blocks,
        roots=list(reader.roots),
        unresolved_refs=unresolved,
    )


def _escape_text(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace("\r", "&#13;")
    )


def _escape_attr(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
        .replace("\t", "&#9;")
        .replace("\n", "&#10;")
        .replace("\r", "&#13;")
    )


def _open_tag(tag: str, attrs: list[tuple[str, str]]) -> str:
    parts = [tag] + [f'{name}="{_escape_attr(value)}"' for name, value in attrs]
    return "<" + " ".join(parts) + ">"


class _Writer:
    def __init__(self) -> None:
        self.lines: list[str] = []

    def line(self, depth: int, text: str) -> None:
        self.lines.append("  " * depth + text)

    def element(self, depth: int, tag: str, attrs: list[tuple[str, str]], text: str = "") -> None:
        self.lines.append("  " * depth + _open_tag(tag, attrs) + _escape_text(text) + f"</{tag}>")

    def render(self) -> bytes:
        return ("\n".join(self.lines) + "\n").encode("utf-8")


def _block_attrs(block: Block) -> list[tuple[str, str]]:
    attrs = [("type", block.block_type), ("id", block.id)]
    if block.position is not None:
        attrs.append(("x", str(block.position[0])))
        attrs.append(("y", str(block.position[1])))
    if block.collapsed:
        attrs.append(("collapsed", "true"))
    if block.disabled:
        attrs.append(("disabled", "true"))
    return attrs


def _write_block(writer: _Writer, blocks: dict[BlockId, Block], block_id: BlockId, depth: int) -> None:
    block = blocks[block_id]
    values = [(n, c) for n, c in block.value_inputs.items() if c is not None]
    statements = [(n, c) for n, c in block.statement_inputs.items() if c is not None]
    has_children = bool(block.fields or values or statements or block.comment is not None or block.next)
    if not has_children:
        writer.element(depth, "block", _block_attrs(block))
        return
    writer.line(depth, _open_tag("block", _block_attrs(block)))
    for name, value in block.fields.items():
        writer.element(depth + 1, "field", [("name", name)], value)
    for name, child in values:
        writer.line(depth + 1, _open_tag("value", [("name", name)]))
        _write_block(writer, blocks, child, depth + 2)
        writer.line(depth + 1, "</value>")
    for name, child in statements:
        writer.line(depth + 1, _open_tag("statement", [("name", name)]))
        _write_block(writer, blocks, child, depth + 2)
        writer.line(depth + 1, "</statement>")
    if block.comment is not None:
        writer.element(depth + 1, "comment", [], block.comment)
    if block.next is not None:
        writer.line(depth + 1, "<next>")
        _write_block(writer, blocks, block.next, depth + 2)
        writer.line(depth + 1, "</next>")
    writer.line(depth, "</block>")


def serialize_workspace(ws: Workspace) -> bytes:
    """Canonical bytes for a workspace; requires a validate-clean workspace."""
    problems = validate(ws)
    if problems:
        raise InvalidWorkspace(
            f"cannot serialize invalid workspace: {problems[0].code}: {problems[0].message}"
        )
    writer = _Writer()
    if not ws.top_level and not len(ws.shelves):
        writer.line(0, "<xml></xml>")
        return writer.render()
    writer.line(0, "<xml>")
    for root in ws.top_level:
        _write_block(writer, ws.blocks, root, 1)
    if len(ws.shelves):
        writer.line(1, "<shelves>")
        for shelf in ws.shelves:
            attrs = [("id", shelf.id), ("name", shelf.name)]
            if not shelf.visible:
                attrs.append(("hidden", "true"))
            if not shelf.members:
                writer.element(2, "shelf", attrs)
                continue
            writer.line(2, _open_tag("shelf", attrs))
            for member in shelf.members:
                writer.element(3, "member", [("id", member)])
            writer.line(2, "</shelf>")
        writer.line(1, "</shelves>")
    writer.line(0, "</xml>")
    return writer.render()


def serialize_shelf_export(doc: ShelfExport) -> bytes:
    """Canonical bytes for a shelf-export document."""
    if doc.format_version != EXPORT_FORMAT_VERSION:
        raise UnsupportedVersion(f"export format version {doc.format_version} not supported")
    _check_document(doc)
    writer = _Writer()
    writer.line(0, _open_tag("shelfexport", [("version", str(doc.format_version)), ("name", doc.shelf_name)]))
    if doc.unresolved_refs:
        writer.line(1, "<unresolved>")
        for ref in doc.unresolved_refs:
            writer.element(2, "ref", [("kind", ref.kind), ("name", ref.name)])
        writer.line(1, "</unresolved>")
    else:
        writer.line(1, "<unresolved></unresolved>")
    for root in doc.roots:
        _write_block(writer, doc.blocks, root, 1)
    writer.line(0, "</shelfexport>")
    return writer.render()
