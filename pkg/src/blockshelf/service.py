"""Embedded HTTP/JSON API over one open workspace.

The service owns a single workspace (loaded by ``blockshelf serve``) and
serializes all mutations through one lock, so applied operations form a
total order and the revision counter increases by exactly 1 per mutation.
Clients are optimistic: every mutating request carries an
``If-Match-Revision`` header and a stale value earns a 409 with the current
revision, never a partial write.

Reads are JSON mirrors of the XML model for frontend ergonomics; shelf
export downloads are the canonical XML bytes, byte-identical to the CLI's
``shelf export`` output for the same state.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import codegen, shelves, xmlio
from .errors import (
    EngineError,
    MalformedDocument,
    ParseError,
    UnknownBlock,
    UnknownShelf,
    UnsupportedVersion,
)
from .model import Block, Workspace, set_comment
from .search import Query, search as search_blocks

REVISION_HEADER = "If-Match-Revision"


class WorkspaceSession:
    """Single-writer holder for the one open workspace."""

    def __init__(self, ws: Workspace, path: str | None = None):
        self.ws = ws
        self.path = path
        self.lock = threading.Lock()


class ShelfBody(BaseModel):
    name: str
    roots: list[str] = []


class RootsBody(BaseModel):
    roots: list[str]


class VisibilityBody(BaseModel):
    visible: bool


class CollapseBody(BaseModel):
    collapsed: bool


class EnabledBody(BaseModel):
    enabled: bool


class CommentBody(BaseModel):
    comment: str | None = None


def _block_payload(block: Block) -> dict:
    return {
        "id": block.id,
        "type": block.block_type,
        "fields": dict(block.fields),
        "values": dict(block.value_inputs),
        "statements": dict(block.statement_inputs),
        "next": block.next,
        "comment": block.comment,
        "collapsed": block.collapsed,
        "disabled": block.disabled,
        "position": list(block.position) if block.position else None,
    }


def _workspace_payload(ws: Workspace) -> dict:
    return {
        "blocks": {block_id: _block_payload(b) for block_id, b in ws.blocks.items()},
        "top_level": list(ws.top_level),
        "visible_roots": shelves.visible_roots(ws),
        "shelves": [
            {"id": s.id, "name": s.name, "visible": s.visible, "members": list(s.members)}
            for s in ws.shelves
        ],
    }


def _status_payload(status: shelves.ShelfStatus) -> dict:
    return {
        "shelf": status.shelf,
        "name": status.name,
        "member_roots": status.member_roots,
        "total_blocks": status.total_blocks,
        "visible": status.visible,
        "collapse_state": status.collapse_state,
        "active_state": status.active_state,
    }


def _error_response(status_code: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status_code, content={"error": code, "message": message})


def _status_for(exc: EngineError) -> int:
    if isinstance(exc, (UnknownBlock, UnknownShelf)):
        return 404
    if isinstance(exc, (ParseError, UnsupportedVersion, MalformedDocument)):
        return 400
    return 422


def create_app(source: str | Workspace, *, save_path: str | None = None) -> FastAPI:
    """Build the API over a workspace file path or an in-memory workspace."""
    if isinstance(source, Workspace):
        session = WorkspaceSession(source, save_path)
    else:
        with open(source, "rb") as handle:
            ws = xmlio.parse_workspace(handle.read())
        session = WorkspaceSession(ws, save_path or source)

    app = FastAPI(title="blockshelf", version="0.1.0")
    app.state.session = session
    # the editor UI is a static page; the service itself binds localhost only
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["Content-Disposition"],
    )

    def envelope(payload, warnings: list[str] | None = None) -> dict:
        return {
            "revision": session.ws.revision,
            "payload": payload,
            "warnings": list(warnings or []),
        }

    def check_revision(request: Request) -> JSONResponse | None:
        raw = request.headers.get(REVISION_HEADER)
        if raw is None:
            return _error_response(400, "missing-revision", f"{REVISION_HEADER} header required")
        try:
            expected = int(raw)
        except ValueError:
            return _error_response(400, "bad-revision", f"{REVISION_HEADER} must be an integer")
        if expected != session.ws.revision:
            return _error_response(
                409, "stale-revision", f"workspace is at revision {session.ws.revision}"
            )
        return None

    def mutate(request: Request, apply):
        """Run one mutation under the single-writer lock."""
        with session.lock:
            stale = check_revision(request)
            if stale is not None:
                return stale
            try:
                payload, warnings = apply(session.ws)
            except EngineError as exc:
                return _error_response(_status_for(exc), exc.code, exc.message)
            return JSONResponse(envelope(payload, warnings))

    @app.get("/workspace")
    def get_workspace():
        with session.lock:
            return envelope(_workspace_payload(session.ws))

    @app.get("/shelves")
    def get_shelves():
        with session.lock:
            return envelope([_status_payload(s) for s in shelves.shelf_box(session.ws)])

    @app.get("/codegen")
    def get_codegen():
        with session.lock:
            try:
                program = codegen.generate(session.ws)
            except EngineError as exc:
                return _error_response(_status_for(exc), exc.code, exc.message)
            return envelope(
                {"text": program.text, "handler_keys": list(program.handler_keys)},
                list(program.warnings),
            )

    @app.get("/search")
    def get_search(
        comment: str | None = None,
        type: str | None = None,
        field: str | None = None,
        shelf: str | None = None,
    ):
        with session.lock:
            field_value = None
            if field is not None:
                name, sep, value = field.partition("=")
                if not sep or not name:
                    return _error_response(400, "bad-field", "field must be NAME=VALUE")
                field_value = (name, value)
            query = Query(
                comment_substring=comment,
                block_type=type,
                field_value=field_value,
                shelf=shelf,
            )
            try:
                matches = search_blocks(session.ws, query)
            except EngineError as exc:
                return _error_response(_status_for(exc), exc.code, exc.message)
            return envelope(
                {
                    "matches": [
                        {
                            "block": m.block,
                            "root": m.root,
                            "shelf": m.shelf,
                            "snippet": m.snippet,
                        }
                        for m in matches
                    ]
                }
            )

    @app.post("/shelves")
    def post_shelves(body: ShelfBody, request: Request):
        def apply(ws):
            shelf_id = shelves.create_shelf(ws, body.name, list(body.roots))
            return {"shelf": shelf_id}, []

        return mutate(request, apply)

    @app.post("/shelves/{shelf_id}/assign")
    def post_assign(shelf_id: str, body: RootsBody, request: Request):
        def apply(ws):
            shelves.assign_to_shelf(ws, shelf_id, list(body.roots))
            return {"shelf": shelf_id, "roots": body.roots}, []

        return mutate(request, apply)

    @app.post("/shelves/{shelf_id}/visibility")
    def post_visibility(shelf_id: str, body: VisibilityBody, request: Request):
        def apply(ws):
            shelves.set_shelf_visibility(ws, shelf_id, body.visible)
            return {"shelf": shelf_id, "visible": body.visible}, []

        return mutate(request, apply)

    @app.post("/shelves/{shelf_id}/collapse")
    def post_collapse(shelf_id: str, body: CollapseBody, request: Request):
        def apply(ws):
            if body.collapsed:
                shelves.minimize_shelf(ws, shelf_id)
            else:
                shelves.maximize_shelf(ws, shelf_id)
            return {"shelf": shelf_id, "collapsed": body.collapsed}, []

        return mutate(request, apply)

    @app.post("/shelves/{shelf_id}/enabled")
    def post_enabled(shelf_id: str, body: EnabledBody, request: Request):
        def apply(ws):
            if body.enabled:
                shelves.activate_shelf(ws, shelf_id)
            else:
                shelves.deactivate_shelf(ws, shelf_id)
            return {"shelf": shelf_id, "enabled": body.enabled}, []

        return mutate(request, apply)

    @app.post("/shelves/{shelf_id}/duplicate")
    def post_duplicate(shelf_id: str, request: Request):
        def apply(ws):
            new_id = shelves.duplicate_shelf(ws, shelf_id)
            return {"shelf": new_id, "name": ws.shelves.shelves[new_id].name}, []

        return mutate(request, apply)

    @app.get("/shelves/{shelf_id}/export")
    def get_export(shelf_id: str):
        with session.lock:
            try:
                doc = shelves.export_shelf(session.ws, shelf_id)
                data = xmlio.serialize_shelf_export(doc)
            except EngineError as exc:
                return _error_response(_status_for(exc), exc.code, exc.message)
            filename = f"{doc.shelf_name}{xmlio.EXPORT_EXTENSION}"
            return Response(
                content=data,
                media_type="application/xml",
                headers={"Content-Disposition": f'attachment; filename="{filename}"'},
            )

    @app.post("/shelves/import")
    async def post_import(request: Request, name_policy: str = "suffix"):
        if name_policy not in ("suffix", "keep"):
            return _error_response(400, "bad-name-policy", "name_policy must be suffix or keep")
        body = await request.body()

        def apply(ws):
            doc = xmlio.parse_shelf_export(body)
            shelf_id, report = shelves.import_shelf(ws, doc, name_policy=name_policy)
            payload = {
                "shelf": shelf_id,
                "name": ws.shelves.shelves[shelf_id].name,
                "id_map": report.id_map,
                "renamed_procedures": report.renamed_procedures,
            }
            return payload, list(report.warnings)

        return mutate(request, apply)

    @app.post("/blocks/{block_id}/comment")
    def post_comment(block_id: str, body: CommentBody, request: Request):
        def apply(ws):
            set_comment(ws, block_id, body.comment)
            return {"block": block_id, "comment": body.comment}, []

        return mutate(request, apply)

    @app.post("/save")
    def post_save():
        with session.lock:
            if session.path is None:
                return _error_response(422, "no-path", "service has no backing file")
            try:
                data = xmlio.serialize_workspace(session.ws)
            except EngineError as exc:
                return _error_response(_status_for(exc), exc.code, exc.message)
            xmlio.write_file_atomic(session.path, data)
            return envelope({"path": session.path, "bytes": len(data)})

    return app
