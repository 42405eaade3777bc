from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Mapping, Optional, Sequence

from ..utils.general import ThurstonError


WHITE, BLACK = 0, 1
COLOR_NAMES: tuple[str, ...] = ("white", "black")
TILE_CLASSES: tuple[str, ...] = ("ww", "wb", "bw", "bb")


class SchemaError(ValueError):
    pass


class DegenerateRule(ThurstonError):
    pass


class InconsistentRule(ThurstonError):
    pass


def tile_class(color: int, container: int) -> str:
    """Class name of a tile of ``color`` inside a tile of color ``container``."""
    return "wb"[color] + "wb"[container]


@dataclass(frozen=True)
class EdgeRecord:
    ends: tuple[int, int]
    image: int
    reversed: bool = False


@dataclass(frozen=True)
class TileRecord:
    color: int
    location: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]


@dataclass(frozen=True)
class CurveChain:
    """The level-1 cells on one 0-edge, ordered along C."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]


@dataclass(frozen=True)
class SubdivisionRule:
    """Level-1 complex of (f, C): labels, edge images, colored and located tiles.

    ``curve[j]`` runs along C from 0-vertex j to 0-vertex j+1, so the white
    0-tile lies on its left. Tile cycles are counterclockwise; edge k of a
    tile joins its vertices k and k+1.
    """

    m: int
    d: int
    vertex_labels: tuple[int, ...]
    edges: tuple[EdgeRecord, ...]
    tiles: tuple[TileRecord, ...]
    curve: tuple[CurveChain, ...]

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_tiles(self) -> int:
        return len(self.tiles)

    @cached_property
    def curve_cells(self) -> dict[tuple[int, int], tuple[int, int]]:
        """(dim, id) -> (0-edge index, position along it) for cells on C."""
        cells = {}
        for j, chain in enumerate(self.curve):
            for pos, v in enumerate(chain.vertices[:-1]):
                cells[(0, v)] = (j, pos)
            for pos, e in enumerate(chain.edges):
                cells[(1, e)] = (j, pos)
        return cells

    def zero_vertex(self, j: int) -> int:
        """The level-1 vertex sitting at 0-vertex j."""
        return self.curve[j].vertices[0]

    @cached_property
    def vertex_degrees(self) -> tuple[int, ...]:
        """deg_f per level-1 vertex, half the incident tile count (rounded down)."""
        slots = Counter(v for t in self.tiles for v in t.vertices)
        return tuple(slots[v] // 2 for v in range(self.num_vertices))

    def label_map(self) -> tuple[int, ...]:
        """Action of f on the 0-vertices."""
        return tuple(self.vertex_labels[self.zero_vertex(j)] for j in range(self.m))


@dataclass(frozen=True)
class RuleStats:
    w_w: int
    w_b: int
    b_w: int
    b_b: int
    w: Fraction
    b: Fraction
    d: int
    deg_on_curve: int

    @property
    def entropy_log_base_e(self) -> str:
        return f"log({self.d})"

    @property
    def eigenvalue(self) -> int:
        """w_w - b_w, the second eigenvalue of the tile-count recurrence."""
        return self.w_w - self.b_w

    def class_counts(self) -> dict[str, int]:
        return {"ww": self.w_w, "wb": self.w_b, "bw": self.b_w, "bb": self.b_b}


def curve_winding(rule: SubdivisionRule) -> int:
    """Degree of f|C from one traversal of C through its level-1 edges."""
    labels = rule.vertex_labels
    signed = 0
    for chain in rule.curve:
        for start, e in zip(chain.vertices, chain.edges):
            image = rule.edges[e].image
            signed += 1 if labels[start] == image else -1
    if signed % rule.m:
        raise InconsistentRule(
            f"curve winding {signed} is not a multiple of m = {rule.m}"
        )
    return signed // rule.m


def rule_stats(rule: SubdivisionRule) -> RuleStats:
    counts = Counter(tile_class(t.color, t.location) for t in rule.tiles)
    w_w, w_b, b_w, b_b = (counts[c] for c in TILE_CLASSES)
    if b_w == 0 or w_b == 0:
        raise InconsistentRule(
            f"tile classes bw={b_w}, wb={w_b} leave w or b undefined"
        )
    if w_w + w_b != rule.d or b_w + b_b != rule.d:
        raise InconsistentRule(
            f"class counts ww={w_w} wb={w_b} bw={b_w} bb={b_b} do not sum to d={rule.d}"
        )
    deg_on_curve = w_w - b_w
    if b_b - w_b != deg_on_curve:
        raise InconsistentRule(
            f"bb - wb = {b_b - w_b} disagrees with ww - bw = {deg_on_curve}"
        )
    winding = curve_winding(rule)
    if winding != deg_on_curve:
        raise InconsistentRule(
            f"winding of f|C is {winding} but ww - bw = {deg_on_curve}"
        )
    total = b_w + w_b
    return RuleStats(
        w_w=w_w,
        w_b=w_b,
        b_w=b_w,
        b_b=b_b,
        w=Fraction(b_w, total),
        b=Fraction(w_b, total),
        d=rule.d,
        deg_on_curve=deg_on_curve,
    )


def build_rule(
    m: int,
    d: int,
    labels: Mapping[Hashable, int],
    edges: Mapping[Hashable, tuple[Sequence[Hashable], int, bool]],
    tiles: Sequence[tuple[int, int, Sequence[Hashable], Sequence[Hashable]]],
    curve: Sequence[tuple[Sequence[Hashable], Sequence[Hashable]]],
) -> SubdivisionRule:
    """Assemble a rule from arbitrary hashable ids, renumbering densely.

    Cells are ordered by (on-curve first, first appearance in tile cycles),
    cells never mentioned by a tile trail in declaration order.
    """
    on_curve_v = {v for chain_v, _ in curve for v in chain_v}
    on_curve_e = {e for _, chain_e in curve for e in chain_e}

    def ordering(declared, on_curve, appearing):
        first = {}
        for raw in appearing:
            first.setdefault(raw, len(first))
        for raw in declared:
            first.setdefault(raw, len(first))
        ranked = sorted(first, key=lambda raw: (raw not in on_curve, first[raw]))
        return {raw: i for i, raw in enumerate(ranked)}

    vmap = ordering(
        labels, on_curve_v, (v for _, _, tv, _ in tiles for v in tv)
    )
    emap = ordering(
        edges, on_curve_e, (e for _, _, _, te in tiles for e in te)
    )
    missing = [raw for raw in vmap if raw not in labels]
    if missing:
        raise SchemaError(f"vertices without a label: {missing[:5]}")
    missing = [raw for raw in emap if raw not in edges]
    if missing:
        raise SchemaError(f"edges without a record: {missing[:5]}")

    vertex_labels = [0] * len(vmap)
    for raw, i in vmap.items():
        vertex_labels[i] = labels[raw]
    edge_records: list[Optional[EdgeRecord]] = [None] * len(emap)
    for raw, i in emap.items():
        ends, image, rev = edges[raw]
        try:
            u, v = (vmap[x] for x in ends)
        except KeyError as exc:
            raise SchemaError(f"edge {raw!r} references unknown vertex {exc}") from None
        edge_records[i] = EdgeRecord(ends=(u, v), image=image, reversed=bool(rev))
    tile_records = tuple(
        TileRecord(
            color=color,
            location=location,
            vertices=tuple(vmap[v] for v in tv),
            edges=tuple(emap[e] for e in te),
        )
        for color, location, tv, te in tiles
    )
    try:
        chains = tuple(
            CurveChain(
                vertices=tuple(vmap[v] for v in cv),
                edges=tuple(emap[e] for e in ce),
            )
            for cv, ce in curve
        )
    except KeyError as exc:
        raise SchemaError(f"curve references unknown cell {exc}") from None
    return SubdivisionRule(
        m=m,
        d=d,
        vertex_labels=tuple(vertex_labels),
        edges=tuple(edge_records),
        tiles=tile_records,
        curve=chains,
    )
