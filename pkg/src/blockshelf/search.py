"""Block search and corpus statistics.

Existing block editors make users check blocks one by one; ``search`` closes
that gap with conjunctive criteria over comments, types, field values and
shelf membership. Result order is semantic, not spatial: stacks are visited
in canonical handler-key order and pre-order within each stack, so the same
workspace always yields the same match list regardless of canvas layout.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .codegen import root_sort_key
from .errors import EmptyCorpus, EmptyQuery
from .model import Block, BlockId, ShelfId, Workspace, block_count, subtree_ids
from .shelves import get_shelf, shelf_of


@dataclass(frozen=True)
class Query:
    """Conjunctive search criteria; at least one must be present.

    ``comment_substring`` matches case-insensitively; ``block_type`` and
    ``field_value`` match exactly; ``shelf`` restricts to one shelf's stacks.
    """

    comment_substring: str | None = None
    block_type: str | None = None
    field_value: tuple[str, str] | None = None
    shelf: ShelfId | None = None


@dataclass(frozen=True)
class Match:
    block: BlockId
    root: BlockId
    shelf: ShelfId | None
    snippet: str


@dataclass(frozen=True)
class CorpusReport:
    projects: int
    counts: tuple[int, ...]
    median: float
    fraction_over_threshold: float
    threshold: int


def _matches(query: Query, block: Block) -> bool:
    if query.comment_substring is not None:
        if block.comment is None:
            return False
        if query.comment_substring.lower() not in block.comment.lower():
            return False
    if query.block_type is not None and block.block_type != query.block_type:
        return False
    if query.field_value is not None:
        name, value = query.field_value
        if block.fields.get(name) != value:
            return False
    return True


def _snippet(query: Query, block: Block) -> str:
    if query.comment_substring is not None and block.comment is not None:
        return block.comment
    if query.field_value is not None:
        name, value = query.field_value
        return f"{name}={value}"
    return block.block_type


def search(ws: Workspace, query: Query) -> list[Match]:
    """All blocks satisfying every present criterion, in semantic order."""
    if (
        query.comment_substring is None
        and query.block_type is None
        and query.field_value is None
        and query.shelf is None
    ):
        raise EmptyQuery("query must carry at least one criterion")
    if query.shelf is not None:
        get_shelf(ws, query.shelf)

    out: list[Match] = []
    roots = sorted(ws.top_level, key=lambda root: root_sort_key(ws, root))
    for root in roots:
        shelf = shelf_of(ws, root)
        if query.shelf is not None and shelf != query.shelf:
            continue
        for block_id in subtree_ids(ws, root):
            block = ws.blocks[block_id]
            if _matches(query, block):
                out.append(Match(block=block_id, root=root, shelf=shelf, snippet=_snippet(query, block)))
    return out


def corpus_stats(workspaces: list[Workspace], threshold: int = 30) -> CorpusReport:
    """Per-project block counts, their median, and the fraction of projects
    strictly above ``threshold`` blocks."""
    if not workspaces:
        raise EmptyCorpus("corpus must contain at least one workspace")
    counts = tuple(block_count(ws) for ws in workspaces)
    over = sum(1 for c in counts if c > threshold)
    return CorpusReport(
        projects=len(counts),
        counts=counts,
        median=float(statistics.median(counts)),
        fraction_over_threshold=over / len(counts),
        threshold=threshold,
    )
