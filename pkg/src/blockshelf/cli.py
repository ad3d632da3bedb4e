"""Command-line interface over workspace files.

stdout is data, stderr is diagnostics (one per line, prefixed ``error:`` or
``warning:``). Exit codes: 0 success, 1 parse/validation/domain failure,
2 usage error. Mutating subcommands rewrite the workspace canonically via a
temp file and atomic rename, so a crash can never corrupt a project file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import codegen, shelves, xmlio
from .errors import EngineError, ParseError
from .model import Workspace, block_count, validate
from .search import Query, corpus_stats, search as search_blocks
from .shelves import find_shelf
from .xmlio import write_file_atomic


def _use_color(stream) -> bool:
    return stream.isatty() and not os.environ.get("BLOCKSHELF_NO_COLOR")


def _emit_diag(prefix: str, message: str) -> None:
    if _use_color(sys.stderr):
        color = "\033[31m" if prefix == "error" else "\033[33m"
        sys.stderr.write(f"{color}{prefix}:\033[0m {message}\n")
    else:
        sys.stderr.write(f"{prefix}: {message}\n")


def error(message: str) -> None:
    _emit_diag("error", message)


def warning(message: str) -> None:
    _emit_diag("warning", message)


def _read_file(path: str) -> bytes:
    with open(path, "rb") as handle:
        return handle.read()


def _load(path: str, lenient: bool = False) -> Workspace:
    warnings: list[str] = []
    ws = xmlio.parse_workspace(_read_file(path), lenient=lenient, warnings=warnings)
    for message in warnings:
        warning(message)
    return ws


def _save(path: str, ws: Workspace) -> None:
    write_file_atomic(path, xmlio.serialize_workspace(ws))


def _field_criterion(raw: str) -> tuple[str, str]:
    name, sep, value = raw.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {raw!r}")
    return name, value


def _offset(raw: str) -> tuple[int, int]:
    try:
        x, y = raw.split(",")
        return int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected DX,DY integers, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockshelf", description="Organize block programs into shelves."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="summarize a workspace file")
    p.add_argument("file")

    p = sub.add_parser("validate", help="check every workspace invariant")
    p.add_argument("file")

    p = sub.add_parser("fmt", help="rewrite a file in canonical form")
    p.add_argument("file")
    p.add_argument("--write", action="store_true", help="rewrite in place instead of stdout")
    p.add_argument("--lenient", action="store_true", help="drop unknown nodes with a warning")

    shelf = sub.add_parser("shelf", help="shelf operations")
    shelf_sub = shelf.add_subparsers(dest="shelf_command", required=True)

    p = shelf_sub.add_parser("create", help="create a shelf over top-level stacks")
    p.add_argument("name")
    p.add_argument("file")
    p.add_argument("--roots", default="", help="comma-separated root block ids")

    p = shelf_sub.add_parser("list", help="list shelves (the ShelfBox)")
    p.add_argument("file")

    p = shelf_sub.add_parser("show", help="show one shelf's status and members")
    p.add_argument("shelf")
    p.add_argument("file")

    for name, help_text in (
        ("vis", "make a shelf's stacks visible"),
        ("hide", "hide a shelf's stacks"),
        ("min", "minimize (collapse) a shelf's stacks"),
        ("max", "maximize (expand) a shelf's stacks"),
        ("on", "activate a shelf (stacks compile again)"),
        ("off", "deactivate a shelf (stacks drop out of codegen)"),
    ):
        p = shelf_sub.add_parser(name, help=help_text)
        p.add_argument("shelf")
        p.add_argument("file")

    p = shelf_sub.add_parser("dup", help="duplicate a shelf and all its stacks")
    p.add_argument("shelf")
    p.add_argument("file")
    p.add_argument("--offset", type=_offset, default=(24, 24))

    p = shelf_sub.add_parser("export", help="write a shelf to a .shelfexport.xml document")
    p.add_argument("file")
    p.add_argument("--shelf", required=True)
    p.add_argument("-o", "--output", required=True)

    p = shelf_sub.add_parser("import", help="import a .shelfexport.xml document as a new shelf")
    p.add_argument("file")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--name-policy", choices=("suffix", "keep"), default="suffix")

    p = sub.add_parser("search", help="find blocks by comment, type, field or shelf")
    p.add_argument("file")
    p.add_argument("--comment")
    p.add_argument("--type", dest="block_type")
    p.add_argument("--field", type=_field_criterion)
    p.add_argument("--shelf")

    p = sub.add_parser("stats", help="block-count statistics over project files")
    p.add_argument("files", nargs="+")
    p.add_argument("--threshold", type=int, default=30)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("codegen", help="emit the canonical program")
    p.add_argument("file")
    p.add_argument("-o", "--output")

    p = sub.add_parser("serve", help="serve the workspace over HTTP for the editor UI")
    p.add_argument("file")
    p.add_argument("--port", type=int, default=8375)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _cmd_inspect(args) -> int:
    ws = _load(args.file)
    roots = len(ws.top_level)
    visible = len(shelves.visible_roots(ws))
    print(f"file: {args.file}")
    print(f"blocks: {block_count(ws)}")
    print(f"roots: {roots}")
    print(f"visible roots: {visible}")
    print(f"shelves: {len(ws.shelves)}")
    for status in shelves.shelf_box(ws):
        print(
            f"  {status.shelf} \"{status.name}\" members={status.member_roots}"
            f" blocks={status.total_blocks} visible={'yes' if status.visible else 'no'}"
            f" collapsed={status.collapse_state} active={status.active_state}"
        )
    return 0


def _cmd_validate(args) -> int:
    ws = _load(args.file)
    problems = validate(ws)
    for diag in problems:
        subject = f" ({diag.subject})" if diag.subject else ""
        _emit_diag(diag.severity, f"{diag.code}: {diag.message}{subject}")
    if any(d.severity == "error" for d in problems):
        return 1
    print("ok")
    return 0


def _cmd_fmt(args) -> int:
    ws = _load(args.file, lenient=args.lenient)
    data = xmlio.serialize_workspace(ws)
    if args.write:
        write_file_atomic(args.file, data)
        print(f"formatted {args.file}")
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    return 0


def _cmd_shelf(args) -> int:
    command = args.shelf_command
    if command == "create":
        ws = _load(args.file)
        roots = [r for r in args.roots.split(",") if r]
        shelf_id = shelves.create_shelf(ws, args.name, roots)
        _save(args.file, ws)
        print(f'created shelf {shelf_id} "{args.name}" ({len(roots)} members)')
        return 0
    if command == "list":
        ws = _load(args.file)
        for status in shelves.shelf_box(ws):
            print(
                f"{status.shelf} \"{status.name}\" members={status.member_roots}"
                f" blocks={status.total_blocks} visible={'yes' if status.visible else 'no'}"
                f" collapsed={status.collapse_state} active={status.active_state}"
            )
        return 0
    if command == "show":
        ws = _load(args.file)
        shelf = find_shelf(ws, args.shelf)
        status = shelves.shelf_status(ws, shelf)
        print(f'shelf {shelf.id} "{shelf.name}"')
        print(f"visible: {'yes' if status.visible else 'no'}")
        print(f"collapsed: {status.collapse_state}")
        print(f"active: {status.active_state}")
        print(f"blocks: {status.total_blocks}")
        print(f"members: {','.join(shelf.members) if shelf.members else '-'}")
        return 0
    if command == "export":
        ws = _load(args.file)
        shelf = find_shelf(ws, args.shelf)
        doc = shelves.export_shelf(ws, shelf.id)
        write_file_atomic(args.output, xmlio.serialize_shelf_export(doc))
        print(
            f'exported shelf {shelf.id} "{shelf.name}" to {args.output}'
            f" ({len(doc.roots)} stacks, {len(doc.unresolved_refs)} unresolved)"
        )
        return 0
    if command == "import":
        ws = _load(args.file)
        doc = xmlio.parse_shelf_export(_read_file(args.source))
        shelf_id, report = shelves.import_shelf(ws, doc, name_policy=args.name_policy)
        _save(args.file, ws)
        for message in report.warnings:
            warning(message)
        for old, new in report.renamed_procedures.items():
            warning(f"procedure {old!r} renamed to {new!r}")
        name = ws.shelves.shelves[shelf_id].name
        print(
            f'imported shelf {shelf_id} "{name}" from {args.source}'
            f" ({len(report.id_map)} blocks, {len(report.warnings)} warnings)"
        )
        return 0

    ws = _load(args.file)
    shelf = find_shelf(ws, args.shelf)
    if command == "vis":
        shelves.set_shelf_visibility(ws, shelf.id, True)
        summary = "visible"
    elif command == "hide":
        shelves.set_shelf_visibility(ws, shelf.id, False)
        summary = "hidden"
    elif command == "min":
        shelves.minimize_shelf(ws, shelf.id)
        summary = "minimized"
    elif command == "max":
        shelves.maximize_shelf(ws, shelf.id)
        summary = "maximized"
    elif command == "on":
        shelves.activate_shelf(ws, shelf.id)
        summary = "activated"
    elif command == "off":
        shelves.deactivate_shelf(ws, shelf.id)
        summary = "deactivated"
    elif command == "dup":
        new_id = shelves.duplicate_shelf(ws, shelf.id, args.offset)
        _save(args.file, ws)
        new_name = ws.shelves.shelves[new_id].name
        print(f'duplicated shelf {shelf.id} "{shelf.name}" as {new_id} "{new_name}"')
        return 0
    else:  # pragma: no cover - argparse restricts choices
        raise AssertionError(command)
    _save(args.file, ws)
    print(f'shelf {shelf.id} "{shelf.name}" {summary}')
    return 0


def _cmd_search(args) -> int:
    ws = _load(args.file)
    shelf_id = find_shelf(ws, args.shelf).id if args.shelf else None
    query = Query(
        comment_substring=args.comment,
        block_type=args.block_type,
        field_value=args.field,
        shelf=shelf_id,
    )
    for match in search_blocks(ws, query):
        shelf_name = (
            ws.shelves.shelves[match.shelf].name if match.shelf is not None else "-"
        )
        snippet = match.snippet.replace("\n", " ")
        print(f"{args.file}:{match.block} shelf={shelf_name} {snippet}")
    return 0


def _cmd_stats(args) -> int:
    workspaces = [_load(path) for path in args.files]
    report = corpus_stats(workspaces, threshold=args.threshold)
    if args.json:
        print(
            json.dumps(
                {
                    "projects": report.projects,
                    "counts": list(report.counts),
                    "median": report.median,
                    "threshold": report.threshold,
                    "fraction_over_threshold": report.fraction_over_threshold,
                },
                sort_keys=True,
            )
        )
        return 0
    print(f"projects {report.projects}")
    print(f"counts {','.join(str(c) for c in report.counts)}")
    print(f"median {report.median}")
    print(f"threshold {report.threshold}")
    print(f"fraction_over_threshold {report.fraction_over_threshold}")
    return 0


def _cmd_codegen(args) -> int:
    ws = _load(args.file)
    program = codegen.generate(ws)
    for message in program.warnings:
        warning(message)
    if args.output:
        write_file_atomic(args.output, program.text.encode("utf-8"))
    else:
        sys.stdout.write(program.text)
        sys.stdout.flush()
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.file)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


_COMMANDS = {
    "inspect": _cmd_inspect,
    "validate": _cmd_validate,
    "fmt": _cmd_fmt,
    "shelf": _cmd_shelf,
    "search": _cmd_search,
    "stats": _cmd_stats,
    "codegen": _cmd_codegen,
    "serve": _cmd_serve,
}


def run(argv: list[str]) -> int:
    """Execute one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        error(f"{exc.line}:{exc.column}: {exc.code}: {exc.message}")
        return 1
    except EngineError as exc:
        error(f"{exc.code}: {exc.message}")
        return 1
    except OSError as exc:
        error(f"io: {exc}")
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
