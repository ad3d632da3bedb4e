"""Canonical event-script compilation.

The meaning of a workspace is a set of event handlers and procedure
definitions; canvas positions, shelf visibility, collapse state, comments and
registry order never influence the output. ``generate`` therefore emits one
s-expression form per enabled top-level handler, sorted by a content-derived
handler key, so two workspaces mean the same thing iff their generated texts
are byte-identical.

The built-in vocabulary is deliberately small: component events, procedure
definition/call, if/repeat control, arithmetic/comparison/logic, variable
get/set, and literals. Extending the language means adding an emitter rule
here, not changing the engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidWorkspace, UnknownBlockType
from .model import Block, BlockId, Workspace, validate

HOLE = "(hole)"


@dataclass(frozen=True)
class BlockRule:
    """Emitter rule for one block type: its role and slot signature."""

    kind: str  # "event-handler" | "procedure-definition" | "statement" | "expression"
    value_slots: tuple[str, ...] = ()
    statement_slots: tuple[str, ...] = ()
    variadic_values: str | None = None  # prefix of an ARG0.. family


VOCABULARY: dict[str, BlockRule] = {
    "component_event": BlockRule("event-handler", statement_slots=("DO",)),
    "procedures_defnoreturn": BlockRule("procedure-definition", statement_slots=("DO",)),
    "procedures_defreturn": BlockRule("procedure-definition", value_slots=("RETURN",)),
    "procedures_callnoreturn": BlockRule("statement", variadic_values="ARG"),
    "procedures_callreturn": BlockRule("expression", variadic_values="ARG"),
    "component_method_call": BlockRule("statement", variadic_values="ARG"),
    "component_set": BlockRule("statement", value_slots=("VALUE",)),
    "component_get": BlockRule("expression"),
    "variables_set": BlockRule("statement", value_slots=("VALUE",)),
    "variables_get": BlockRule("expression"),
    "controls_if": BlockRule("statement", statement_slots=("ELSE",)),
    "controls_repeat": BlockRule("statement", value_slots=("TIMES",), statement_slots=("DO",)),
    "math_number": BlockRule("expression"),
    "text": BlockRule("expression"),
    "logic_boolean": BlockRule("expression"),
    "math_arithmetic": BlockRule("expression", value_slots=("A", "B")),
    "math_compare": BlockRule("expression", value_slots=("A", "B")),
    "logic_operation": BlockRule("expression", value_slots=("A", "B")),
    "logic_negate": BlockRule("expression", value_slots=("BOOL",)),
}

_ARITH_OPS = {"ADD": "+", "MINUS": "-", "MULTIPLY": "*", "DIVIDE": "/"}
_COMPARE_OPS = {"EQ": "=", "NEQ": "!=", "LT": "<", "LTE": "<=", "GT": ">", "GTE": ">="}
_LOGIC_OPS = {"AND": "and", "OR": "or"}


@dataclass(frozen=True)
class CanonicalProgram:
    """Deterministic textual compile of a workspace.

    ``handler_keys[i]`` names the form on line i of ``text``; the keys are
    strictly sorted. ``warnings`` records tolerated oddities (disabled
    expressions emitted as ``(hole)``, ignored floating stacks).
    """

    text: str
    handler_keys: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class SemanticsDelta:
    """One handler-level difference between two programs."""

    kind: str  # "added" | "removed" | "changed"
    key: str
    before: str | None = None
    after: str | None = None


def root_sort_key(ws: Workspace, root: BlockId) -> str:
    """Content-derived sort key for a top-level stack.

    For handlers this is the emission key: type, component, event/procedure
    name, with the block id as final tiebreaker (duplicated handlers collide
    on every other part by construction).
    """
    block = ws.block(root)
    component = block.fields.get("COMPONENT", "")
    name = (
        block.fields.get("EVENT")
        or block.fields.get("NAME")
        or block.fields.get("PROCNAME")
        or ""
    )
    return "/".join((block.block_type, component, name, root))


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


class _Emitter:
    def __init__(self, ws: Workspace):
        self.ws = ws
        self.warnings: list[str] = []

    def expression(self, block_id: BlockId | None) -> str:
        if block_id is None:
            return HOLE
        block = self.ws.blocks[block_id]
        if block.disabled:
            self.warnings.append(f"disabled expression {block_id} emitted as (hole)")
            return HOLE
        rule = VOCABULARY[block.block_type]
        t = block.block_type
        if t == "math_number":
            return block.fields.get("NUM") or "0"
        if t == "text":
            return _quote(block.fields.get("TEXT", ""))
        if t == "logic_boolean":
            return "true" if block.fields.get("BOOL", "FALSE") == "TRUE" else "false"
        if t == "variables_get":
            return f"(get {block.fields.get('VAR', '')})"
        if t == "component_get":
            return f"(prop {block.fields.get('COMPONENT', '')} {block.fields.get('PROPERTY', '')})"
        if t == "math_arithmetic":
            op = _ARITH_OPS.get(block.fields.get("OP", ""), "?op")
            return self._apply(op, block, rule)
        if t == "math_compare":
            op = _COMPARE_OPS.get(block.fields.get("OP", ""), "?op")
            return self._apply(op, block, rule)
        if t == "logic_operation":
            op = _LOGIC_OPS.get(block.fields.get("OP", ""), "?op")
            return self._apply(op, block, rule)
        if t == "logic_negate":
            return self._apply("not", block, rule)
        if t == "procedures_callreturn":
            args = self._variadic(block, rule)
            return _form("call-value", block.fields.get("PROCNAME", ""), *args)
        raise UnknownBlockType(f"{t!r} is not an expression type", subject=block_id)

    def _apply(self, op: str, block: Block, rule: BlockRule) -> str:
        return _form(op, *(self.expression(block.value_inputs.get(n)) for n in rule.value_slots))

    def _variadic(self, block: Block, rule: BlockRule) -> list[str]:
        args = []
        i = 0
        while f"{rule.variadic_values}{i}" in block.value_inputs:
            args.append(self.expression(block.value_inputs[f"{rule.variadic_values}{i}"]))
            i += 1
        return args

    def statement_chain(self, first: BlockId | None) -> list[str]:
        """Emit the enabled statements of a chain; disabled ones are skipped
        but their ``next`` continues."""
        out: list[str] = []
        current = first
        while current is not None:
            block = self.ws.blocks[current]
            if not block.disabled:
                out.append(self.statement(block))
            current = block.next
        return out

    def statement(self, block: Block) -> str:
        rule = VOCABULARY[block.block_type]
        t = block.block_type
        if t == "variables_set":
            value = self.expression(block.value_inputs.get("VALUE"))
            return _form("set", block.fields.get("VAR", ""), value)
        if t == "component_set":
            value = self.expression(block.value_inputs.get("VALUE"))
            return _form(
                "set-prop",
                block.fields.get("COMPONENT", ""),
                block.fields.get("PROPERTY", ""),
                value,
            )
        if t == "component_method_call":
            args = self._variadic(block, rule)
            return _form(
                "invoke", block.fields.get("COMPONENT", ""), block.fields.get("METHOD", ""), *args
            )
        if t == "procedures_callnoreturn":
            args = self._variadic(block, rule)
            return _form("call", block.fields.get("PROCNAME", ""), *args)
        if t == "controls_repeat":
            times = self.expression(block.value_inputs.get("TIMES"))
            body = self.statement_chain(block.statement_inputs.get("DO"))
            return _form("repeat", times, _form("do", *body))
        if t == "controls_if":
            parts: list[str] = []
            i = 0
            while f"IF{i}" in block.value_inputs or f"DO{i}" in block.statement_inputs:
                parts.append(self.expression(block.value_inputs.get(f"IF{i}")))
                parts.append(_form("do", *self.statement_chain(block.statement_inputs.get(f"DO{i}"))))
                i += 1
            if "ELSE" in block.statement_inputs:
                parts.append(_form("else", *self.statement_chain(block.statement_inputs.get("ELSE"))))
            return _form("if", *parts)
        raise UnknownBlockType(f"{t!r} is not a statement type", subject=block.id)

    def top_form(self, root: BlockId) -> str:
        block = self.ws.blocks[root]
        t = block.block_type
        if t == "component_event":
            body = self.statement_chain(block.statement_inputs.get("DO"))
            return _form(
                "when", block.fields.get("COMPONENT", ""), block.fields.get("EVENT", ""), *body
            )
        if t == "procedures_defnoreturn":
            body = self.statement_chain(block.statement_inputs.get("DO"))
            return _form("defproc", block.fields.get("NAME", ""), *body)
        if t == "procedures_defreturn":
            value = self.expression(block.value_inputs.get("RETURN"))
            return _form("defproc-value", block.fields.get("NAME", ""), value)
        raise UnknownBlockType(f"{t!r} is not a top-level form", subject=root)


def _form(*parts: str) -> str:
    return "(" + " ".join(p for p in parts if p != "") + ")"


def generate(ws: Workspace) -> CanonicalProgram:
    """Compile a workspace to its canonical program.

    Emits one form per enabled top-level event handler or procedure
    definition, sorted by handler key. Disabled roots vanish (deactivation is
    observationally deletion); floating non-handler stacks are ignored with a
    warning.
    """
    problems = validate(ws)
    if problems:
        raise InvalidWorkspace(f"workspace fails validation: {problems[0].code}")
    for block_id in sorted(ws.blocks):
        block_type = ws.blocks[block_id].block_type
        if block_type not in VOCABULARY:
            raise UnknownBlockType(f"no emitter rule for {block_type!r}", subject=block_id)

    emitter = _Emitter(ws)
    keyed: list[tuple[str, BlockId]] = []
    for root in ws.top_level:
        kind = VOCABULARY[ws.blocks[root].block_type].kind
        if kind not in ("event-handler", "procedure-definition"):
            emitter.warnings.append(f"floating {kind} stack {root} ignored")
            continue
        if ws.blocks[root].disabled:
            continue
        keyed.append((root_sort_key(ws, root), root))
    keyed.sort(key=lambda pair: pair[0])

    lines = [emitter.top_form(root) for _, root in keyed]
    text = "\n".join(lines) + "\n" if lines else ""
    return CanonicalProgram(
        text=text,
        handler_keys=tuple(key for key, _ in keyed),
        warnings=tuple(emitter.warnings),
    )


def semantics_diff(a: CanonicalProgram, b: CanonicalProgram) -> list[SemanticsDelta]:
    """Handler-level differences between two programs: empty iff texts equal."""
    forms_a = dict(zip(a.handler_keys, a.text.splitlines()))
    forms_b = dict(zip(b.handler_keys, b.text.splitlines()))
    out: list[SemanticsDelta] = []
    for key in sorted(set(forms_a) | set(forms_b)):
        if key not in forms_b:
            out.append(SemanticsDelta("removed", key, before=forms_a[key]))
        elif key not in forms_a:
            out.append(SemanticsDelta("added", key, after=forms_b[key]))
        elif forms_a[key] != forms_b[key]:
            out.append(SemanticsDelta("changed", key, before=forms_a[key], after=forms_b[key]))
    return out


def scan_references(blocks: dict[BlockId, Block]) -> tuple[set[tuple[str, str]], set[tuple[str, str]]]:
    """(defined, referenced) name sets over a block collection.

    Procedures are defined by definition blocks and referenced by calls;
    variables are defined by any setter and referenced by getters; component
    names are only ever referenced (their definitions live in the app
    designer, outside any block document).
    """
    defined: set[tuple[str, str]] = set()
    referenced: set[tuple[str, str]] = set()
    for block in blocks.values():
        t = block.block_type
        if t in ("procedures_defnoreturn", "procedures_defreturn"):
            name = block.fields.get("NAME", "")
            if name:
                defined.add(("procedure", name))
        elif t in ("procedures_callnoreturn", "procedures_callreturn"):
            name = block.fields.get("PROCNAME", "")
            if name:
                referenced.add(("procedure", name))
        elif t == "variables_set":
            name = block.fields.get("VAR", "")
            if name:
                defined.add(("variable", name))
        elif t == "variables_get":
            name = block.fields.get("VAR", "")
            if name:
                referenced.add(("variable", name))
        component = block.fields.get("COMPONENT", "")
        if component:
            referenced.add(("component", component))
    return defined, referenced
