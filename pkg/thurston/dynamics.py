from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .complex import TILE, VERTEX, Cell, CellRef, ComplexTower, GluingError
from .rulekit import WHITE, SubdivisionRule
from .utils.general import ThurstonError


class DepthExhausted(ThurstonError):
    pass


@dataclass(frozen=True)
class PointAddress:
    """Minimal cells of a point at levels 0..depth."""

    cells: tuple[CellRef, ...]

    def __post_init__(self):
        if not self.cells:
            raise ValueError("an address needs at least its level-0 cell")
        for i, c in enumerate(self.cells):
            if c.level != i:
                raise ValueError(f"cell {c} sits at position {i} of the address")

    @property
    def depth(self) -> int:
        return len(self.cells) - 1

    def __getitem__(self, level: int) -> CellRef:
        return self.cells[level]

    @property
    def is_generic(self) -> bool:
        return all(c.dim == TILE for c in self.cells)

    @property
    def is_vertex(self) -> bool:
        return self.cells[-1].dim == VERTEX

    def truncate(self, depth: int) -> "PointAddress":
        if depth > self.depth:
            raise DepthExhausted(f"cannot extend an address of depth {self.depth} to {depth}")
        return PointAddress(self.cells[: depth + 1])

    def sort_key(self) -> tuple:
        return tuple((c.dim, c.id) for c in self.cells)

    def __str__(self) -> str:
        return ";".join(f"{c.level},{c.dim},{c.id}" for c in self.cells)


def same_point(p: PointAddress, q: PointAddress) -> bool:
    """Minimal cells agree on every shared level."""
    depth = min(p.depth, q.depth)
    return p.cells[: depth + 1] == q.cells[: depth + 1]


def apply_map(tower: ComplexTower, p: PointAddress) -> PointAddress:
    if p.depth < 1:
        raise DepthExhausted("f cannot be applied to a depth-0 address")
    return PointAddress(tuple(tower.image(c) for c in p.cells[1:]))


def iterate_map(tower: ComplexTower, p: PointAddress, k: int) -> PointAddress:
    for _ in range(k):
        p = apply_map(tower, p)
    return p


def lift_cell(tower: ComplexTower, top: Cell, c: CellRef) -> CellRef:
    """The level-(L+1) cell inside level-1 cell ``top`` mapped onto ``c``."""
    root = tower.level(c.level).root[c.dim][c.id]
    sheet = tower.sheets.lift(top, root)
    finer = tower.level(c.level + 1)
    return CellRef(c.level + 1, c.dim, finer.lookup(c.dim, (sheet[0], sheet[1], c.id)))


def pull_back(tower: ComplexTower, p: PointAddress, sheet: Cell) -> PointAddress:
    """The preimage of p lying in the closed level-1 cell ``sheet``."""
    c0 = p.cells[0]
    top = tower.sheets.lift(sheet, (c0.dim, c0.id))
    finer = [lift_cell(tower, top, c) for c in p.cells]
    rdim, rid = tower.sheets.roots[top[0]][top[1]]
    return PointAddress((CellRef(0, rdim, rid),) + tuple(finer))


def preimages(tower: ComplexTower, p: PointAddress) -> list[tuple[PointAddress, int]]:
    """All y with f(y) = p, with weight deg_f(y); the weights sum to d."""
    c0 = p.cells[0]
    colors = tower.sheets.tile_color
    if c0.dim == TILE:
        sheets = [y for y, color in enumerate(colors) if color == c0.id]
        share = 1
    else:
        # every 1-tile holds one preimage of a point of C; a preimage on a
        # 1-edge is seen by its 2 tiles, one at a 1-vertex by 2·deg tiles
        sheets = list(range(len(colors)))
        share = 2
    hits = Counter(pull_back(tower, p, (TILE, y)) for y in sheets)
    result = []
    for q in sorted(hits, key=PointAddress.sort_key):
        if hits[q] % share:
            raise GluingError(f"preimage {q} is covered by {hits[q]} sheets")
        result.append((q, hits[q] // share))
    return result


def vertex_address(tower: ComplexTower, v: CellRef, depth: int) -> PointAddress:
    if v.dim != VERTEX:
        raise ValueError(f"{v} is not a vertex")
    if depth < v.level:
        raise ValueError(f"depth {depth} is below the vertex level {v.level}")
    cells = tower.ancestors(v)
    while cells[-1].level < depth:
        cells.append(tower.persistent_vertex(cells[-1], cells[-1].level + 1))
    return PointAddress(tuple(cells))


def cell_address(tower: ComplexTower, w: CellRef, depth: int, period: Optional[int] = None) -> PointAddress:
    """Address of the point of w fixed by f^period (period defaults to w's level).

    Levels beyond w come from pulling coarser cells back along the sheets of
    w, f(w), ..., f^(period-1)(w).
    """
    period = w.level if period is None else period
    cells = tower.ancestors(w)
    if depth <= w.level:
        return PointAddress(tuple(cells[: depth + 1]))
    if period < 1:
        raise ValueError("only cells of level >= 1 carry a periodic point")
    tops = []
    cur = w
    for _ in range(period):
        key = tower.level(cur.level).keys[cur.dim][cur.id]
        tops.append((key[0], key[1]))
        cur = tower.image(cur)
    for i in range(w.level + 1, depth + 1):
        x = cells[i - period]
        for top in reversed(tops):
            x = lift_cell(tower, top, x)
        cells.append(x)
    return PointAddress(tuple(cells))


def generic_point(tower: ComplexTower, depth: int = 0, color: int = WHITE) -> PointAddress:
    """An interior, non-postcritical point of a 0-tile truncated at ``depth``."""
    cells = [CellRef(0, TILE, color)]
    for _ in range(depth):
        cells.append(min(c for c in tower.children(cells[-1]) if c.dim == TILE))
    return PointAddress(tuple(cells))


def local_degree_along_orbit(tower: ComplexTower, p: PointAddress, n: int) -> int:
    """deg_{f^n}(p) as the product of deg_f along p, f(p), ..., f^(n-1)(p)."""
    if p.depth < n:
        raise DepthExhausted(f"deg of f^{n} needs depth {n}, address has {p.depth}")
    level1 = tower.level(1)
    degree = 1
    q = p
    for step in range(n):
        c1 = q.cells[1]
        if c1.dim == VERTEX:
            degree *= level1.local_degree(c1.id)
        if step + 1 < n:
            q = apply_map(tower, q)
    return degree


def preimage_tree_sizes(tower: ComplexTower, p: PointAddress, n: int) -> list[int]:
    """card f^{-k}(p) for k = 0..n."""
    sizes = [1]
    frontier = [p]
    for _ in range(n):
        frontier = [q for x in frontier for q, _ in preimages(tower, x)]
        sizes.append(len(frontier))
    return sizes


@dataclass(frozen=True)
class CriticalReport:
    critical_vertices: tuple[tuple[int, int], ...]
    postcritical_orbits: dict
    cycles: tuple[tuple[int, ...], ...]
    periodic_critical: tuple[tuple[int, int], ...]
    has_periodic_critical: bool
    kappa: int

    @property
    def degree_excess(self) -> int:
        return sum(deg - 1 for _, deg in self.critical_vertices)


def analyze_critical(rule: SubdivisionRule) -> CriticalReport:
    degrees = rule.vertex_degrees
    critical = tuple((v, deg) for v, deg in enumerate(degrees) if deg >= 2)
    label_map = rule.label_map()

    orbits = {}
    for j in range(rule.m):
        orbit = [j]
        while label_map[orbit[-1]] not in orbit:
            orbit.append(label_map[orbit[-1]])
        orbits[j] = tuple(orbit)
    cycles = []
    on_cycle = {}
    for j in range(rule.m):
        start = label_map[orbits[j][-1]]
        if start in on_cycle:
            continue
        cycle = [start]
        while label_map[cycle[-1]] != start:
            cycle.append(label_map[cycle[-1]])
        cycles.append(tuple(cycle))
        for x in cycle:
            on_cycle[x] = len(cycle)

    zero_vertices = {rule.zero_vertex(j): j for j in range(rule.m)}
    periodic = tuple(
        (v, on_cycle[zero_vertices[v]])
        for v, _ in critical
        if v in zero_vertices and zero_vertices[v] in on_cycle
    )
    return CriticalReport(
        critical_vertices=critical,
        postcritical_orbits=orbits,
        cycles=tuple(cycles),
        periodic_critical=periodic,
        has_periodic_critical=bool(periodic),
        kappa=math.prod(period for _, period in periodic),
    )
