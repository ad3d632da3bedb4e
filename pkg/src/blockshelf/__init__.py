"""blockshelf: a headless engine for organizing block programs into shelves.

Shelves are named groups of top-level block stacks with five operations:
visibility, minimize/maximize, activate/deactivate, duplicate, and
export/import for cross-project re-use. A canonical code generator makes the
semantics mechanically checkable: positions, visibility and collapse state
never affect the compiled result, while deactivation removes a stack's
handlers exactly as deletion would.
"""

from .codegen import CanonicalProgram, SemanticsDelta, generate, semantics_diff
from .errors import EngineError, ParseError
from .model import (
    Block,
    BlockId,
    Diagnostic,
    Shelf,
    ShelfId,
    ShelfRegistry,
    Slot,
    Workspace,
    add_block,
    block_count,
    block_count_in,
    connect,
    disconnect,
    duplicate_subtree,
    effective_disabled,
    new_workspace,
    set_collapsed,
    set_comment,
    set_disabled,
    validate,
)
from .search import CorpusReport, Match, Query, corpus_stats, search
from .shelves import (
    ImportReport,
    ShelfExport,
    ShelfStatus,
    UnresolvedRef,
    activate_shelf,
    assign_to_shelf,
    create_shelf,
    deactivate_shelf,
    duplicate_shelf,
    export_shelf,
    find_shelf,
    import_shelf,
    maximize_shelf,
    minimize_shelf,
    remove_from_shelf,
    set_shelf_visibility,
    shelf_box,
    shelf_of,
    visible_roots,
)
from .xmlio import (
    parse_shelf_export,
    parse_workspace,
    serialize_shelf_export,
    serialize_workspace,
)

__version__ = "0.1.0"

__all__ = [
    "Block",
    "BlockId",
    "CanonicalProgram",
    "CorpusReport",
    "Diagnostic",
    "EngineError",
    "ImportReport",
    "Match",
    "ParseError",
    "Query",
    "SemanticsDelta",
    "Shelf",
    "ShelfExport",
    "ShelfId",
    "ShelfRegistry",
    "ShelfStatus",
    "Slot",
    "UnresolvedRef",
    "Workspace",
    "activate_shelf",
    "add_block",
    "assign_to_shelf",
    "block_count",
    "block_count_in",
    "connect",
    "corpus_stats",
    "create_shelf",
    "deactivate_shelf",
    "disconnect",
    "duplicate_shelf",
    "duplicate_subtree",
    "effective_disabled",
    "export_shelf",
    "find_shelf",
    "generate",
    "import_shelf",
    "maximize_shelf",
    "minimize_shelf",
    "new_workspace",
    "parse_shelf_export",
    "parse_workspace",
    "remove_from_shelf",
    "search",
    "semantics_diff",
    "serialize_shelf_export",
    "serialize_workspace",
    "set_collapsed",
    "set_comment",
    "set_disabled",
    "set_shelf_visibility",
    "shelf_box",
    "shelf_of",
    "validate",
    "visible_roots",
]
