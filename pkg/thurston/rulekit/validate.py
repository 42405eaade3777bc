from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterator

from .rule import BLACK, WHITE, SubdivisionRule


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    cells: tuple = ()

    def __str__(self) -> str:
        where = f" [{', '.join(map(str, self.cells))}]" if self.cells else ""
        return f"{self.code}: {self.message}{where}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, cells=()) -> None:
        self.violations.append(Violation(code, message, tuple(cells)))

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)


def _check_counts(rule: SubdivisionRule, report: ValidationReport) -> None:
    m, d = rule.m, rule.d
    if m < 3:
        report.add("degenerate", f"m = {m}, need at least 3 postcritical points")
    if d < 2:
        report.add("degenerate", f"d = {d}, need degree at least 2")
    if rule.num_tiles != 2 * d:
        report.add(
            "tile-count", f"tile count ≠ 2d: {rule.num_tiles} tiles, expected {2 * d}"
        )
    colors = Counter(t.color for t in rule.tiles)
    if colors[WHITE] != d or colors[BLACK] != d:
        report.add(
            "color-count",
            f"{colors[WHITE]} white and {colors[BLACK]} black tiles, expected {d} each",
        )
    if rule.num_edges != m * d:
        report.add(
            "edge-count", f"edge count ≠ m·d: {rule.num_edges}, expected {m * d}"
        )
    if rule.num_vertices > m * d:
        report.add(
            "vertex-count", f"vertex count {rule.num_vertices} exceeds m·d = {m * d}"
        )
    images = Counter(e.image for e in rule.edges)
    for j in range(m):
        if images[j] != d:
            cells = [i for i, e in enumerate(rule.edges) if e.image == j]
            report.add(
                "edge-preimage",
                f"0-edge {j} has {images[j]} preimage edges, expected {d}",
                cells,
            )


def _check_tiles(rule: SubdivisionRule, report: ValidationReport) -> None:
    m, labels = rule.m, rule.vertex_labels
    for t, tile in enumerate(rule.tiles):
        if len(tile.vertices) != m or len(tile.edges) != m:
            report.add(
                "m-gon",
                f"tile {t} has {len(tile.vertices)} vertices and {len(tile.edges)} edges, expected {m}",
                [t],
            )
            continue
        step = 1 if tile.color == WHITE else -1
        for k in range(m):
            u, v = tile.vertices[k], tile.vertices[(k + 1) % m]
            e = tile.edges[k]
            if set(rule.edges[e].ends) != {u, v}:
                report.add(
                    "tile-boundary",
                    f"edge {e} at slot {k} of tile {t} does not join vertices {u} and {v}",
                    [t, e],
                )
            if (labels[v] - labels[u]) % m != step % m:
                report.add(
                    "label-rotation",
                    f"tile {t} ({'white' if step == 1 else 'black'}) steps from label "
                    f"{labels[u]} to {labels[v]}",
                    [t, u, v],
                )
                continue
            expected = labels[u] if tile.color == WHITE else labels[v]
            if rule.edges[e].image != expected:
                report.add(
                    "edge-image",
                    f"edge {e} maps to 0-edge {rule.edges[e].image}, its ends force {expected}",
                    [e],
                )


def _check_edges(rule: SubdivisionRule, report: ValidationReport) -> None:
    m, labels = rule.m, rule.vertex_labels
    for i, e in enumerate(rule.edges):
        a, b = (labels[v] for v in e.ends)
        if {a, b} != {e.image, (e.image + 1) % m}:
            report.add(
                "edge-orientation",
                f"edge {i} with end labels {a},{b} cannot map onto 0-edge {e.image}",
                [i],
            )
        elif e.reversed != (a != e.image):
            report.add(
                "edge-orientation",
                f"edge {i} reversed flag {e.reversed} contradicts end labels {a},{b}",
                [i],
            )

    uses = defaultdict(list)
    for t, tile in enumerate(rule.tiles):
        k_max = min(len(tile.vertices), len(tile.edges))
        for k in range(k_max):
            e = tile.edges[k]
            start = tile.vertices[k]
            uses[e].append((t, start))
    for i in range(rule.num_edges):
        slots = uses.get(i, [])
        if len(slots) != 2:
            report.add(
                "edge-incidence",
                f"edge {i} lies in {len(slots)} tile slots, expected 2",
                [i] + [t for t, _ in slots],
            )
            continue
        (t1, s1), (t2, s2) = slots
        if s1 == s2:
            report.add(
                "edge-incidence",
                f"tiles {t1} and {t2} traverse edge {i} in the same direction",
                [i, t1, t2],
            )
        if rule.tiles[t1].color == rule.tiles[t2].color:
            report.add(
                "coloring", f"tiles {t1} and {t2} share edge {i} and a color", [t1, t2]
            )


def _check_curve(rule: SubdivisionRule, report: ValidationReport) -> bool:
    m = rule.m
    if len(rule.curve) != m:
        report.add(
            "curve-order",
            f"curve order: C must pass through {m} 0-vertices, found {len(rule.curve)} chains",
        )
        return False
    good = True
    seen = Counter()
    for j, chain in enumerate(rule.curve):
        if len(chain.vertices) != len(chain.edges) + 1 or not chain.edges:
            report.add(
                "curve-order",
                f"curve order: chain {j} has {len(chain.vertices)} vertices for {len(chain.edges)} edges",
            )
            good = False
            continue
        nxt = rule.curve[(j + 1) % m]
        if nxt.vertices and chain.vertices[-1] != nxt.vertices[0]:
            report.add(
                "curve-order",
                f"curve order: chain {j} ends at {chain.vertices[-1]}, chain {(j + 1) % m} "
                f"starts at {nxt.vertices[0]}",
            )
            good = False
        for k, e in enumerate(chain.edges):
            ends = set(rule.edges[e].ends)
            if ends != {chain.vertices[k], chain.vertices[k + 1]}:
                report.add(
                    "curve-order",
                    f"curve order: edge {e} does not join chain {j} vertices "
                    f"{chain.vertices[k]} and {chain.vertices[k + 1]}",
                    [e],
                )
                good = False
        seen.update(chain.vertices[:-1])
        seen.update(("e", e) for e in chain.edges)
    repeated = [c for c, n in seen.items() if n > 1]
    if repeated:
        report.add("curve-order", "curve order: C is not a simple cycle", repeated)
        good = False
    return good


def _check_locations(rule: SubdivisionRule, report: ValidationReport) -> None:
    curve_edges = {}
    for chain in rule.curve:
        for k, e in enumerate(chain.edges):
            curve_edges[e] = chain.vertices[k]
    owners = defaultdict(list)
    for t, tile in enumerate(rule.tiles):
        for k, e in enumerate(tile.edges[: len(tile.vertices)]):
            owners[e].append((t, tile.vertices[k]))
    for e, slots in owners.items():
        if len(slots) != 2:
            continue
        locs = {rule.tiles[t].location for t, _ in slots}
        if e in curve_edges:
            if locs != {WHITE, BLACK}:
                report.add(
                    "location",
                    f"curve edge {e} does not separate the two 0-tiles",
                    [e] + [t for t, _ in slots],
                )
                continue
            for t, start in slots:
                if rule.tiles[t].location == WHITE and start != curve_edges[e]:
                    report.add(
                        "side",
                        f"white-located tile {t} traverses curve edge {e} against C",
                        [t, e],
                    )
        elif len(locs) != 1:
            report.add(
                "location",
                f"edge {e} off C separates tiles of different locations",
                [e] + [t for t, _ in slots],
            )


def _euler(tiles) -> int:
    vertices = {v for t in tiles for v in t.vertices}
    edges = {e for t in tiles for e in t.edges}
    return len(vertices) - len(edges) + len(tiles)


def _check_topology(rule: SubdivisionRule, report: ValidationReport) -> None:
    for side, name in ((WHITE, "white"), (BLACK, "black")):
        chi = _euler([t for t in rule.tiles if t.location == side])
        if chi != 1:
            report.add("euler", f"{name} side has V - E + F = {chi}, expected 1")
    chi = _euler(rule.tiles)
    if chi != 2:
        report.add("euler", f"V - E + F = {chi}, expected 2")

    slots = Counter(v for t in rule.tiles for v in t.vertices)
    odd = [v for v in range(rule.num_vertices) if slots[v] % 2]
    if odd:
        report.add("flower-parity", "vertices with an odd number of tiles", odd)
    missing = [v for v in range(rule.num_vertices) if slots[v] == 0]
    if missing:
        report.add("flower-parity", "vertices in no tile", missing)
    excess = sum(max(slots[v] // 2 - 1, 0) for v in range(rule.num_vertices))
    if excess != 2 * rule.d - 2:
        report.add(
            "riemann-hurwitz",
            f"sum of (deg - 1) over vertices is {excess}, expected 2d - 2 = {2 * rule.d - 2}",
        )


def _check_postcritical(rule: SubdivisionRule, report: ValidationReport) -> None:
    label_map = rule.label_map()
    degrees = rule.vertex_degrees
    reached = set()
    for v, deg in enumerate(degrees):
        if deg < 2:
            continue
        j = rule.vertex_labels[v]
        while j not in reached:
            reached.add(j)
            j = label_map[j]
    missing = [j for j in range(rule.m) if j not in reached]
    if missing:
        report.add(
            "postcritical",
            "0-vertices outside every critical orbit",
            missing,
        )


def validate_rule(rule: SubdivisionRule) -> ValidationReport:
    """Every violated necessary condition, as data."""
    report = ValidationReport()
    _check_counts(rule, report)
    _check_tiles(rule, report)
    _check_edges(rule, report)
    curve_ok = _check_curve(rule, report)
    _check_locations(rule, report)
    _check_topology(rule, report)
    if curve_ok:
        _check_postcritical(rule, report)
    return report
