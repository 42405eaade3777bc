"""Cell decompositions D^n(f, C) built by fiber-product subdivision.

A level-(n+1) cell is keyed by ``(top_dim, top_id, image_id)``: the level-1
cell whose interior contains it and its image, a level-n cell of the same
dimension. Tables of each dimension are sorted by key, so ids are canonical.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional

from tqdm import tqdm

from .config import DEFAULT_LEVEL_CAP
from .logging import logger
from .rulekit import (
    BLACK,
    TILE_CLASSES,
    WHITE,
    CurveChain,
    EdgeRecord,
    InconsistentRule,
    SubdivisionRule,
    TileRecord,
    rule_digest,
    rule_stats,
    tile_class,
)
from .utils.general import ThurstonError, as_integer


VERTEX, EDGE, TILE = 0, 1, 2
DIM_NAMES = ("vertex", "edge", "tile")


class GluingError(ThurstonError):
    pass


class LevelUnavailable(ThurstonError):
    pass


@dataclass(frozen=True, order=True)
class CellRef:
    level: int
    dim: int
    id: int

    def __str__(self) -> str:
        return f"({self.level},{self.dim},{self.id})"


Cell = tuple[int, int]  # (dim, id) within one level
Key = tuple[int, int, int]


class SheetTable:
    """Level-1 lookups used to lift cells through f."""

    def __init__(self, rule: SubdivisionRule):
        m = rule.m
        labels = rule.vertex_labels
        self.m = m
        self.tile_color = [t.color for t in rule.tiles]
        self.edge_image = [e.image for e in rule.edges]
        self.vertex_label = list(labels)
        self.tile_vertex = []
        self.tile_edge = []
        for t in rule.tiles:
            by_label = [-1] * m
            for v in t.vertices:
                by_label[labels[v]] = v
            by_image = [-1] * m
            for e in t.edges:
                by_image[rule.edges[e].image] = e
            self.tile_vertex.append(by_label)
            self.tile_edge.append(by_image)
        self.edge_end = [{labels[v]: v for v in e.ends} for e in rule.edges]

        vertex_root = [None] * rule.num_vertices
        edge_root = [None] * rule.num_edges
        for j, chain in enumerate(rule.curve):
            for pos, v in enumerate(chain.vertices[:-1]):
                vertex_root[v] = (VERTEX, j) if pos == 0 else (EDGE, j)
            for e in chain.edges:
                edge_root[e] = (EDGE, j)
        for t in rule.tiles:
            for v in t.vertices:
                if vertex_root[v] is None:
                    vertex_root[v] = (TILE, t.location)
            for e in t.edges:
                if edge_root[e] is None:
                    edge_root[e] = (TILE, t.location)
        self.roots = (
            vertex_root,
            edge_root,
            [(TILE, t.location) for t in rule.tiles],
        )

    def lift(self, sheet: Cell, root: Cell) -> Cell:
        """The face of level-1 cell ``sheet`` that f maps onto the 0-cell ``root``."""
        sdim, sid = sheet
        rdim, rid = root
        if sdim == TILE:
            if rdim == TILE:
                if self.tile_color[sid] != rid:
                    raise GluingError(f"tile {sid} does not cover 0-tile {rid}")
                return sheet
            if rdim == EDGE:
                return (EDGE, self.tile_edge[sid][rid])
            return (VERTEX, self.tile_vertex[sid][rid])
        if sdim == EDGE:
            if rdim == EDGE and self.edge_image[sid] == rid:
                return sheet
            if rdim == VERTEX and rid in self.edge_end[sid]:
                return (VERTEX, self.edge_end[sid][rid])
        elif rdim == VERTEX and self.vertex_label[sid] == rid:
            return sheet
        raise GluingError(f"level-1 cell {sheet} does not cover 0-cell {root}")


@dataclass(eq=False)
class CellComplex:
    """One level of the decomposition; treat as immutable once built.

    Per dimension: ``keys`` (empty at level 0), ``image`` (id at level n-1),
    ``parent`` ((dim, id) at level n-1, the smallest cell containing it),
    ``root`` (the smallest 0-cell containing it) and ``base`` (the 0-cell of
    equal dimension reached by f^n: color of a tile, label of a vertex).
    """

    level: int
    m: int
    keys: tuple[list, list, list]
    image: tuple[list, list, list]
    parent: tuple[list, list, list]
    root: tuple[list, list, list]
    base: tuple[list, list, list]
    edge_ends: list
    tile_vertices: list
    tile_edges: list
    container: list = field(default_factory=list)

    def num(self, dim: int) -> int:
        return len(self.base[dim])

    @property
    def num_vertices(self) -> int:
        return self.num(VERTEX)

    @property
    def num_edges(self) -> int:
        return self.num(EDGE)

    @property
    def num_tiles(self) -> int:
        return self.num(TILE)

    def ref(self, dim: int, cid: int) -> CellRef:
        return CellRef(self.level, dim, cid)

    def cells(self, dim: int) -> Iterable[CellRef]:
        return (CellRef(self.level, dim, i) for i in range(self.num(dim)))

    def color(self, tile: int) -> int:
        return self.base[TILE][tile]

    def label(self, vertex: int) -> int:
        return self.base[VERTEX][vertex]

    def on_curve(self, dim: int, cid: int) -> bool:
        return self.root[dim][cid][0] != TILE

    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_tiles

    @cached_property
    def index(self) -> tuple[dict, dict, dict]:
        return tuple({key: i for i, key in enumerate(keys)} for keys in self.keys)

    def lookup(self, dim: int, key: Key) -> int:
        try:
            return self.index[dim][key]
        except KeyError:
            raise GluingError(
                f"no level-{self.level} {DIM_NAMES[dim]} with key {key}"
            ) from None

    @cached_property
    def vertex_tiles(self) -> list[list[int]]:
        incident = [[] for _ in range(self.num_vertices)]
        for t, vs in enumerate(self.tile_vertices):
            for v in vs:
                incident[v].append(t)
        return incident

    @cached_property
    def vertex_edges(self) -> list[list[int]]:
        incident = [[] for _ in range(self.num_vertices)]
        for e, (u, v) in enumerate(self.edge_ends):
            incident[u].append(e)
            incident[v].append(e)
        return incident

    @cached_property
    def edge_tiles(self) -> list[list[int]]:
        incident = [[] for _ in range(self.num_edges)]
        for t, es in enumerate(self.tile_edges):
            for e in es:
                incident[e].append(t)
        return incident

    @cached_property
    def children_index(self) -> dict[Cell, list[Cell]]:
        """Level-(n-1) cell -> the level-n cells whose parent it is."""
        children = defaultdict(list)
        for dim in (VERTEX, EDGE, TILE):
            for i, p in enumerate(self.parent[dim]):
                children[p].append((dim, i))
        return children

    def flower(self, vertex: int) -> set[CellRef]:
        cells = {CellRef(self.level, VERTEX, vertex)}
        cells.update(CellRef(self.level, EDGE, e) for e in self.vertex_edges[vertex])
        cells.update(CellRef(self.level, TILE, t) for t in self.vertex_tiles[vertex])
        return cells

    def local_degree(self, vertex: int) -> int:
        return len(self.vertex_tiles[vertex]) // 2

    def zero_vertex(self, j: int) -> int:
        """The vertex sitting at 0-vertex j."""
        return self._zero_vertices[j]

    @cached_property
    def _zero_vertices(self) -> list[int]:
        found = [-1] * self.m
        for v, (rdim, rid) in enumerate(self.root[VERTEX]):
            if rdim == VERTEX:
                found[rid] = v
        return found

    def curve_chain(self, j: int) -> CurveChain:
        """Vertices and edges on 0-edge j, ordered from 0-vertex j to j+1."""
        on_edge = defaultdict(list)
        for e, root in enumerate(self.root[EDGE]):
            if root == (EDGE, j):
                u, v = self.edge_ends[e]
                on_edge[u].append(e)
                on_edge[v].append(e)
        start, stop = self.zero_vertex(j), self.zero_vertex((j + 1) % self.m)
        vertices, edges = [start], []
        v, came = start, None
        while v != stop or not edges:
            step = [e for e in on_edge[v] if e != came]
            if len(step) != 1:
                raise GluingError(f"0-edge {j} is not a path at level {self.level}")
            came = step[0]
            u, w = self.edge_ends[came]
            v = w if u == v else u
            edges.append(came)
            vertices.append(v)
        return CurveChain(vertices=tuple(vertices), edges=tuple(edges))

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "m": self.m,
            "keys": [[list(k) for k in keys] for keys in self.keys],
            "image": [list(x) for x in self.image],
            "parent": [[list(p) for p in ps] for ps in self.parent],
            "root": [[list(r) for r in rs] for rs in self.root],
            "base": [list(x) for x in self.base],
            "edge_ends": [list(e) for e in self.edge_ends],
            "tile_vertices": [list(t) for t in self.tile_vertices],
            "tile_edges": [list(t) for t in self.tile_edges],
            "container": list(self.container),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CellComplex":
        return cls(
            level=data["level"],
            m=data["m"],
            keys=tuple([tuple(k) for k in keys] for keys in data["keys"]),
            image=tuple(list(x) for x in data["image"]),
            parent=tuple([tuple(p) for p in ps] for ps in data["parent"]),
            root=tuple([tuple(r) for r in rs] for rs in data["root"]),
            base=tuple(list(x) for x in data["base"]),
            edge_ends=[tuple(e) for e in data["edge_ends"]],
            tile_vertices=[tuple(t) for t in data["tile_vertices"]],
            tile_edges=[tuple(t) for t in data["tile_edges"]],
            container=list(data["container"]),
        )


def base_complex(m: int) -> CellComplex:
    """D^0: 0-vertices, 0-edges j from j to j+1, the white and the black 0-tile."""
    vertices = list(range(m))
    edges = list(range(m))
    return CellComplex(
        level=0,
        m=m,
        keys=([], [], []),
        image=([], [], []),
        parent=([], [], []),
        root=(
            [(VERTEX, j) for j in vertices],
            [(EDGE, j) for j in edges],
            [(TILE, WHITE), (TILE, BLACK)],
        ),
        base=(list(vertices), list(edges), [WHITE, BLACK]),
        edge_ends=[(j, (j + 1) % m) for j in edges],
        tile_vertices=[tuple(vertices), (0,) + tuple(range(m - 1, 0, -1))],
        tile_edges=[tuple(edges), tuple(range(m - 1, -1, -1))],
        container=[],
    )


def subdivide(
    prev: CellComplex, rule: SubdivisionRule | SheetTable, progress: bool = False
) -> CellComplex:
    """Level n+1 from level n: pull every n-cell back through every level-1 sheet."""
    sheets = rule if isinstance(rule, SheetTable) else SheetTable(rule)
    level = prev.level + 1
    prev_root = prev.root

    def lift(sheet: Cell, dim: int, cid: int) -> Key:
        top = sheets.lift(sheet, prev_root[dim][cid])
        return (top[0], top[1], cid)

    by_root = ([], [])
    for t in range(prev.num_tiles):
        by_root[prev_root[TILE][t][1]].append(t)

    tile_keys, tile_vkeys, tile_ekeys = [], [], []
    sheet_ids = range(len(sheets.tile_color))
    for y in tqdm(sheet_ids, desc=f"level {level}", disable=not progress, leave=False):
        sheet = (TILE, y)
        for z in by_root[sheets.tile_color[y]]:
            tile_keys.append((TILE, y, z))
            tile_vkeys.append(tuple(lift(sheet, VERTEX, v) for v in prev.tile_vertices[z]))
            tile_ekeys.append(tuple(lift(sheet, EDGE, e) for e in prev.tile_edges[z]))

    edge_uses = Counter(k for ks in tile_ekeys for k in ks)
    bad = [k for k, n in edge_uses.items() if n != 2]
    if bad:
        raise GluingError(
            f"{len(bad)} level-{level} edges lie in other than two tiles, e.g. {bad[0]}"
        )
    vertex_keys = sorted({k for ks in tile_vkeys for k in ks})
    edge_keys = sorted(edge_uses)
    order = sorted(range(len(tile_keys)), key=tile_keys.__getitem__)
    tile_keys = [tile_keys[i] for i in order]
    tile_vkeys = [tile_vkeys[i] for i in order]
    tile_ekeys = [tile_ekeys[i] for i in order]

    m, d = prev.m, len(sheets.tile_color) // 2
    if len(tile_keys) != 2 * d**level or len(edge_keys) != m * d**level:
        raise GluingError(
            f"level {level} has {len(tile_keys)} tiles and {len(edge_keys)} edges, "
            f"expected {2 * d**level} and {m * d**level}"
        )
    keys = (vertex_keys, edge_keys, tile_keys)
    index = tuple({k: i for i, k in enumerate(ks)} for ks in keys)

    edge_ends = []
    for td, tid, e in edge_keys:
        edge_ends.append(
            tuple(index[VERTEX][lift((td, tid), VERTEX, v)] for v in prev.edge_ends[e])
        )
    tile_vertices = [tuple(index[VERTEX][k] for k in ks) for ks in tile_vkeys]
    tile_edges = [tuple(index[EDGE][k] for k in ks) for ks in tile_ekeys]
    for t, (vs, es) in enumerate(zip(tile_vertices, tile_edges)):
        for k, e in enumerate(es):
            if set(edge_ends[e]) != {vs[k], vs[(k + 1) % m]}:
                raise GluingError(f"edge {e} does not close slot {k} of level-{level} tile {t}")

    image, parent, root, base = [], [], [], []
    for dim, ks in enumerate(keys):
        image.append([k[2] for k in ks])
        root.append([sheets.roots[k[0]][k[1]] for k in ks])
        base.append([prev.base[dim][k[2]] for k in ks])
        if prev.level == 0:
            parent.append([sheets.roots[k[0]][k[1]] for k in ks])
        else:
            parents = []
            for td, tid, c in ks:
                pdim, pid = prev.parent[dim][c]
                parents.append((pdim, prev.lookup(pdim, (td, tid, pid))))
            parent.append(parents)

    if prev.level == 0:
        container = [prev.base[TILE][r[1]] for r in root[TILE]]
    else:
        container = [prev.base[TILE][p[1]] for p in parent[TILE]]

    logger.debug(
        f"built level {level}: {len(vertex_keys)} vertices, "
        f"{len(edge_keys)} edges, {len(tile_keys)} tiles"
    )
    return CellComplex(
        level=level,
        m=m,
        keys=keys,
        image=tuple(image),
        parent=tuple(parent),
        root=tuple(root),
        base=tuple(base),
        edge_ends=edge_ends,
        tile_vertices=tile_vertices,
        tile_edges=tile_edges,
        container=container,
    )


class ComplexTower:
    """The rule with its decompositions D^0, D^1, ... built on demand."""

    def __init__(
        self,
        rule: SubdivisionRule,
        level_cap: int = DEFAULT_LEVEL_CAP,
        cache=None,
        progress: bool = False,
    ):
        self.rule = rule
        self.level_cap = level_cap
        self.cache = cache
        self.progress = progress
        self.sheets = SheetTable(rule)
        self.counters = Counter()
        self._levels = {0: base_complex(rule.m)}

    @property
    def m(self) -> int:
        return self.rule.m

    @property
    def d(self) -> int:
        return self.rule.d

    @cached_property
    def stats(self):
        return rule_stats(self.rule)

    @cached_property
    def digest(self) -> str:
        return rule_digest(self.rule)

    def built_levels(self) -> list[int]:
        return sorted(self._levels)

    def level(self, n: int) -> CellComplex:
        if n < 0:
            raise ValueError(f"negative level {n}")
        if n > self.level_cap:
            raise LevelUnavailable(f"level {n} exceeds the level cap {self.level_cap}")
        if n in self._levels:
            self.counters["memory_hits"] += 1
            return self._levels[n]
        cx = self.cache.load(self.digest, n) if self.cache is not None else None
        if cx is None:
            prev = self.level(n - 1)
            cx = subdivide(prev, self.sheets, progress=self.progress)
            self.counters["builds"] += 1
            if self.cache is not None:
                self.cache.store(self.digest, cx)
        self._levels[n] = cx
        return cx

    def drop(self, n: int) -> None:
        if n > 0:
            self._levels.pop(n, None)

    def complex_of(self, ref: CellRef) -> CellComplex:
        return self.level(ref.level)

    def parent(self, ref: CellRef) -> CellRef:
        if ref.level == 0:
            raise ValueError("level-0 cells have no parent")
        pdim, pid = self.level(ref.level).parent[ref.dim][ref.id]
        return CellRef(ref.level - 1, pdim, pid)

    def ancestor(self, ref: CellRef, level: int) -> CellRef:
        while ref.level > level:
            ref = self.parent(ref)
        return ref

    def ancestors(self, ref: CellRef) -> list[CellRef]:
        """Smallest cells containing ``ref`` at levels 0..ref.level."""
        chain = [ref]
        while chain[-1].level > 0:
            chain.append(self.parent(chain[-1]))
        return chain[::-1]

    def image(self, ref: CellRef) -> CellRef:
        if ref.level == 0:
            raise ValueError("level-0 cells have no image")
        return CellRef(ref.level - 1, ref.dim, self.level(ref.level).image[ref.dim][ref.id])

    def children(self, ref: CellRef) -> list[CellRef]:
        finer = self.level(ref.level + 1)
        return [
            CellRef(ref.level + 1, dim, cid)
            for dim, cid in finer.children_index.get((ref.dim, ref.id), ())
        ]

    def descendants(self, ref: CellRef, level: int, dim: Optional[int] = None) -> list[CellRef]:
        """Level-``level`` cells inside ``ref``, optionally of one dimension."""
        frontier = [ref]
        for _ in range(ref.level, level):
            frontier = [c for cell in frontier for c in self.children(cell)]
            if dim == TILE:
                frontier = [c for c in frontier if c.dim == TILE]
        if dim is not None:
            frontier = [c for c in frontier if c.dim == dim]
        return sorted(frontier)

    def persistent_vertex(self, v: CellRef, level: int) -> CellRef:
        """The level-``level`` copy of vertex ``v``."""
        if v.dim != VERTEX:
            raise ValueError(f"{v} is not a vertex")
        if level < v.level:
            raise ValueError(f"vertex {v} does not exist at level {level}")
        while v.level < level:
            (child,) = [c for c in self.children(v) if c.dim == VERTEX]
            v = child
        return v


def tile_class_counts(cx: CellComplex) -> dict[str, int]:
    """Tiles by (color, color of the parent tile)."""
    if cx.level < 1:
        raise ValueError("tile classes need level >= 1")
    counts = Counter(
        tile_class(color, container) for color, container in zip(cx.base[TILE], cx.container)
    )
    return {c: counts[c] for c in TILE_CLASSES}


def root_class_counts(cx: CellComplex) -> dict[str, int]:
    """Tiles by (color, containing 0-tile): the classes of the iterate f^n."""
    counts = Counter(
        tile_class(color, root[1]) for color, root in zip(cx.base[TILE], cx.root[TILE])
    )
    return {c: counts[c] for c in TILE_CLASSES}


def count_white_tiles_in(tower: ComplexTower, target: CellRef, i: int) -> int:
    """White level-i tiles inside a level-m tile, checked against the closed form."""
    if target.dim != TILE:
        raise ValueError(f"{target} is not a tile")
    if i < target.level:
        raise ValueError(f"level {i} is coarser than the target level {target.level}")
    if i > tower.level_cap:
        raise LevelUnavailable(f"level {i} exceeds the level cap {tower.level_cap}")
    fine = tower.level(i)
    count = sum(
        1 for t in tower.descendants(target, i, TILE) if fine.color(t.id) == WHITE
    )
    stats = tower.stats
    k = i - target.level
    lam = stats.eigenvalue
    if tower.complex_of(target).color(target.id) == WHITE:
        closed = stats.w * tower.d**k + stats.b * lam**k
    else:
        closed = stats.b * tower.d**k - stats.b * lam**k
    closed = as_integer(closed, f"white tile count at level {i} in {target}")
    if closed != count:
        raise InconsistentRule(
            f"{count} white level-{i} tiles in {target}, the closed form gives {closed}"
        )
    return count


def flower(tower: ComplexTower, v: CellRef) -> set[CellRef]:
    if v.dim != VERTEX:
        raise ValueError(f"{v} is not a vertex")
    return tower.level(v.level).flower(v.id)


def local_degree_at(tower: ComplexTower, v: CellRef) -> int:
    """deg_{f^n}(v) for a level-n vertex: half its incident tiles."""
    if v.dim != VERTEX:
        raise ValueError(f"{v} is not a vertex")
    return tower.level(v.level).local_degree(v.id)


def met_zero_edges(cx: CellComplex, tile: int) -> set[int]:
    met = set()
    for v in cx.tile_vertices[tile]:
        rdim, rid = cx.root[VERTEX][v]
        if rdim == VERTEX:
            met.update((rid, (rid - 1) % cx.m))
        elif rdim == EDGE:
            met.add(rid)
    return met


def joins_opposite_sides(t: CellRef, cx: CellComplex) -> bool:
    met = met_zero_edges(cx, t.id)
    m = cx.m
    if m == 3:
        return len(met) == 3
    return any((i - j) % m not in (0, 1, m - 1) for i in met for j in met)


def find_expansion_level(tower: ComplexTower, max_n: int) -> Optional[int]:
    """Smallest n <= max_n at which no tile joins opposite sides, None if none."""
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    for n in range(1, min(max_n, tower.level_cap) + 1):
        cx = tower.level(n)
        if not any(joins_opposite_sides(t, cx) for t in cx.cells(TILE)):
            return n
    return None


@dataclass(frozen=True)
class CoverReport:
    edge: CellRef
    k: int
    tiles: frozenset
    contained: bool

    @property
    def card(self) -> int:
        return len(self.tiles)

    def normalized(self, d: int) -> Fraction:
        return Fraction(self.card, d**self.k)


def interior_contains(cx: CellComplex, tiles: Iterable[int], cells: Iterable[Cell]) -> bool:
    """Whether every (dim, id) cell lies in the interior of the union of ``tiles``.

    The boundary of the union is made of the edges with exactly one incident
    tile in the set, together with their end vertices.
    """
    tiles = set(tiles)
    inside = Counter(e for t in tiles for e in cx.tile_edges[t])
    boundary_edges = {e for e, n in inside.items() if n < len(cx.edge_tiles[e])}
    boundary_vertices = {v for e in boundary_edges for v in cx.edge_ends[e]}
    for dim, cid in cells:
        if dim == TILE and cid not in tiles:
            return False
        if dim == EDGE and (cid in boundary_edges or cid not in inside):
            return False
        if dim == VERTEX and (cid in boundary_vertices or not set(cx.vertex_tiles[cid]) & tiles):
            return False
    return True


def cover_edge(tower: ComplexTower, e: CellRef, k: int) -> CoverReport:
    """Level-(m+k) tiles meeting e in a vertex; their union's interior contains e."""
    if e.dim != EDGE:
        raise ValueError(f"{e} is not an edge")
    level = e.level + k
    cx = tower.level(level)
    coarse = tower.level(e.level)
    on_e = set(tower.descendants(e, level))
    for v in coarse.edge_ends[e.id]:
        on_e.add(tower.persistent_vertex(CellRef(e.level, VERTEX, v), level))
    tiles = set()
    for c in on_e:
        if c.dim == VERTEX:
            tiles.update(cx.vertex_tiles[c.id])
    contained = interior_contains(cx, tiles, ((c.dim, c.id) for c in on_e))
    return CoverReport(
        edge=e,
        k=k,
        tiles=frozenset(CellRef(level, TILE, t) for t in tiles),
        contained=contained,
    )


def cover_growth(tower: ComplexTower, e: CellRef, ks: Iterable[int]) -> list[CoverReport]:
    return [cover_edge(tower, e, k) for k in ks]


def iterate_rule(rule: SubdivisionRule, n: int, tower: Optional[ComplexTower] = None) -> SubdivisionRule:
    """Rule of f^n with the same curve: its level-1 complex is D^n(f, C)."""
    if n < 1:
        raise ValueError("iterate_rule needs n >= 1")
    if tower is None:
        tower = ComplexTower(rule, level_cap=max(n, DEFAULT_LEVEL_CAP))
    cx = tower.level(n)
    labels = cx.base[VERTEX]
    edges = tuple(
        EdgeRecord(ends=tuple(ends), image=image, reversed=labels[ends[0]] != image)
        for ends, image in zip(cx.edge_ends, cx.base[EDGE])
    )
    tiles = tuple(
        TileRecord(color=color, location=root[1], vertices=tuple(vs), edges=tuple(es))
        for color, root, vs, es in zip(
            cx.base[TILE], cx.root[TILE], cx.tile_vertices, cx.tile_edges
        )
    )
    return SubdivisionRule(
        m=rule.m,
        d=rule.d**n,
        vertex_labels=tuple(labels),
        edges=edges,
        tiles=tiles,
        curve=tuple(cx.curve_chain(j) for j in range(rule.m)),
    )


def check_complex(cx: CellComplex, prev: Optional[CellComplex], d: int) -> list[str]:
    """Structural problems of a level (empty when all invariants hold)."""
    problems = []
    n, m = cx.level, cx.m
    if cx.num_tiles != 2 * d**n:
        problems.append(f"{cx.num_tiles} tiles, expected {2 * d**n}")
    if cx.num_edges != m * d**n:
        problems.append(f"{cx.num_edges} edges, expected {m * d**n}")
    if cx.num_vertices > m * d**n:
        problems.append(f"{cx.num_vertices} vertices exceed {m * d**n}")
    if cx.euler_characteristic() != 2:
        problems.append(f"Euler characteristic {cx.euler_characteristic()}")
    for t in range(cx.num_tiles):
        if len(cx.tile_vertices[t]) != m or len(cx.tile_edges[t]) != m:
            problems.append(f"tile {t} is not an {m}-gon")
    odd = [v for v in range(cx.num_vertices) if len(cx.vertex_tiles[v]) % 2]
    if odd:
        problems.append(f"vertices with odd flowers: {odd[:5]}")
    if prev is None:
        return problems
    for t in range(cx.num_tiles):
        img = cx.image[TILE][t]
        if cx.base[TILE][t] != prev.base[TILE][img]:
            problems.append(f"tile {t} and its image differ in color")
        mapped = tuple(cx.image[VERTEX][v] for v in cx.tile_vertices[t])
        target = prev.tile_vertices[img]
        if not any(mapped == target[s:] + target[:s] for s in range(m)):
            problems.append(f"boundary of tile {t} does not map onto tile {img}")
    children = Counter(p for p in cx.parent[TILE])
    for t in range(prev.num_tiles):
        if children[(TILE, t)] != d:
            problems.append(f"level-{n - 1} tile {t} has {children[(TILE, t)]} children")
    for v in range(prev.num_vertices):
        copies = [c for c in cx.children_index.get((VERTEX, v), ()) if c[0] == VERTEX]
        if len(copies) != 1:
            problems.append(f"level-{n - 1} vertex {v} persists {len(copies)} times")
    for dim in (VERTEX, EDGE, TILE):
        for i, (pdim, pid) in enumerate(cx.parent[dim]):
            if pdim < dim or prev.root[pdim][pid] != cx.root[dim][i]:
                problems.append(f"{DIM_NAMES[dim]} {i} has an inconsistent parent")
    return problems
