from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .complex import (
    EDGE,
    TILE,
    VERTEX,
    CellComplex,
    CellRef,
    ComplexTower,
    find_expansion_level,
)
from .dynamics import (
    PointAddress,
    analyze_critical,
    cell_address,
    iterate_map,
    local_degree_along_orbit,
    preimages,
    same_point,
)
from .logging import logger, warning_once
from .rulekit import InconsistentRule
from .utils.general import ThurstonError, divisors, mobius


LOCI = ("tile-interior", "curve-edge-interior", "vertex")
ORIENTATIONS = ("preserve", "reverse", "fold")


class ExpansionNotEstablished(ThurstonError):
    pass


class PeriodicCriticalPresent(ThurstonError):
    pass


@dataclass(frozen=True)
class FixedPointRecord:
    address: PointAddress
    weight: int
    locus: str
    witness: tuple[CellRef, ...]


@dataclass(frozen=True)
class FixedSite:
    cell: CellRef
    orientation: str


@dataclass(frozen=True)
class CircleAnalysis:
    fixed_sites: tuple[FixedSite, ...]
    degree_on_curve: int

    def count(self, orientation: str) -> int:
        return sum(1 for s in self.fixed_sites if s.orientation == orientation)

    @property
    def signed_count(self) -> int:
        return self.count("preserve") - self.count("reverse")


@dataclass(frozen=True)
class PreperiodicCensus:
    m: int
    n: int
    s: int
    s_tilde: int
    points: tuple[tuple[PointAddress, int], ...]


def resolve_iterate(tower: ComplexTower, n: int) -> tuple[int, int]:
    """Level N = n·k of the smallest multiple of n at which f^N is expanding."""
    if n < 1:
        raise ValueError("iterate must be at least 1")
    n0 = find_expansion_level(tower, tower.level_cap)
    if n0 is None:
        raise ExpansionNotEstablished(
            f"tiles join opposite sides at every level up to {tower.level_cap}"
        )
    k = -(-n0 // n)
    if k > 1:
        warning_once(f"f^{n} is not expanding at level 1, using f^{n * k} instead")
    return n * k, k


def _fixed_vertices(cx: CellComplex) -> set[int]:
    return {
        v
        for v, (root, base) in enumerate(zip(cx.root[VERTEX], cx.base[VERTEX]))
        if root == (VERTEX, base)
    }


def _fixed_edges(cx: CellComplex) -> set[int]:
    return {
        e
        for e, (root, base) in enumerate(zip(cx.root[EDGE], cx.base[EDGE]))
        if root == (EDGE, base)
    }


def fixed_candidate_tiles(tower: ComplexTower, n: int) -> list[CellRef]:
    """Tiles X of the iterate with X inside F(X): classes ww and bb."""
    level, _ = resolve_iterate(tower, n)
    cx = tower.level(level)
    candidates = [
        CellRef(level, TILE, t)
        for t, (root, base) in enumerate(zip(cx.root[TILE], cx.base[TILE]))
        if root[1] == base
    ]
    expected = tower.d**level + tower.stats.deg_on_curve**level
    if len(candidates) != expected:
        raise InconsistentRule(
            f"{len(candidates)} candidate tiles at level {level}, expected {expected}"
        )
    return candidates


def locate_fixed_point(tower: ComplexTower, t: CellRef, depth: int) -> PointAddress:
    """Address of the unique fixed point of f^(t.level) in the candidate tile t."""
    cx = tower.level(t.level)
    if t.dim != TILE or cx.root[TILE][t.id][1] != cx.base[TILE][t.id]:
        raise ValueError(f"{t} is not a fixed-point candidate tile")
    fixed_v = _fixed_vertices(cx)
    for v in cx.tile_vertices[t.id]:
        if v in fixed_v:
            return cell_address(tower, CellRef(t.level, VERTEX, v), depth)
    fixed_e = _fixed_edges(cx)
    for e in cx.tile_edges[t.id]:
        if e in fixed_e:
            return cell_address(tower, CellRef(t.level, EDGE, e), depth)
    return cell_address(tower, t, depth)


def _locus(address: PointAddress) -> str:
    return LOCI[2 - address.cells[-1].dim]


def circle_analysis(tower: ComplexTower) -> CircleAnalysis:
    """Fixed sites of f|C with their orientation behaviour."""
    rule = tower.rule
    m = rule.m
    cx = tower.level(1)
    fixed_v = _fixed_vertices(cx)
    sites = []
    for j in range(m):
        v = cx.zero_vertex(j)
        if v not in fixed_v:
            continue
        incoming = rule.edges[rule.curve[(j - 1) % m].edges[-1]].image
        outgoing = rule.edges[rule.curve[j].edges[0]].image
        if incoming == (j - 1) % m and outgoing == j:
            orientation = "preserve"
        elif incoming == j and outgoing == (j - 1) % m:
            orientation = "reverse"
        elif incoming == outgoing:
            orientation = "fold"
        else:
            raise InconsistentRule(f"f|C is not locally monotone at 0-vertex {j}")
        sites.append(FixedSite(CellRef(1, VERTEX, v), orientation))
    for e in sorted(_fixed_edges(cx)):
        if any(u in fixed_v for u in cx.edge_ends[e]):
            continue
        j, position = rule.curve_cells[(EDGE, e)]
        start = rule.curve[j].vertices[position]
        orientation = "preserve" if rule.vertex_labels[start] == j else "reverse"
        sites.append(FixedSite(CellRef(1, EDGE, e), orientation))

    analysis = CircleAnalysis(
        fixed_sites=tuple(sites), degree_on_curve=tower.stats.deg_on_curve
    )
    if analysis.signed_count != analysis.degree_on_curve - 1:
        raise InconsistentRule(
            f"preserve - reverse = {analysis.signed_count}, "
            f"deg(f|C) - 1 = {analysis.degree_on_curve - 1}"
        )
    return analysis


def enumerate_fixed_points(
    tower: ComplexTower, n: int, depth: Optional[int] = None
) -> list[FixedPointRecord]:
    """Fixed points of f^n, deduplicated by address, weighted by deg_{f^n}."""
    level, k = resolve_iterate(tower, n)
    depth = max(depth or 0, level if k == 1 else level + n)
    cx = tower.level(level)
    fixed_v = _fixed_vertices(cx)
    fixed_e = _fixed_edges(cx)

    witnesses: dict[PointAddress, list[CellRef]] = {}
    for v in sorted(fixed_v):
        witnesses.setdefault(cell_address(tower, CellRef(level, VERTEX, v), depth), [])
    for e in sorted(fixed_e):
        if not any(u in fixed_v for u in cx.edge_ends[e]):
            witnesses.setdefault(cell_address(tower, CellRef(level, EDGE, e), depth), [])
    for t in fixed_candidate_tiles(tower, n):
        witnesses.setdefault(locate_fixed_point(tower, t, depth), []).append(t)

    records = []
    for address in sorted(witnesses, key=PointAddress.sort_key):
        if k > 1 and not same_point(iterate_map(tower, address, n), address):
            continue
        records.append(
            FixedPointRecord(
                address=address,
                weight=local_degree_along_orbit(tower, address, n),
                locus=_locus(address),
                witness=tuple(witnesses[address]),
            )
        )
    total = sum(r.weight for r in records)
    if total != 1 + tower.d**n:
        raise InconsistentRule(
            f"fixed points of f^{n} have total weight {total}, expected {1 + tower.d**n}"
        )
    logger.debug(f"f^{n}: {len(records)} fixed points, total weight {total}")
    return records


def preperiodic_census(
    tower: ComplexTower, m: int, n: int, depth: Optional[int] = None
) -> PreperiodicCensus:
    """S_n^m = f^{-m}(Fix f^(n-m)) with s (weighted by deg_{f^n}) and s~."""
    if not 0 <= m < n:
        raise ValueError(f"need 0 <= m < n, got m={m}, n={n}")
    frontier = [
        (r.address, r.weight) for r in enumerate_fixed_points(tower, n - m, depth)
    ]
    for _ in range(m):
        frontier = [
            (q, weight * deg) for p, weight in frontier for q, deg in preimages(tower, p)
        ]
    s = sum(weight for _, weight in frontier)
    if s != tower.d**n + tower.d**m:
        raise InconsistentRule(
            f"s_{n}^{m} = {s}, expected d^n + d^m = {tower.d**n + tower.d**m}"
        )
    return PreperiodicCensus(m=m, n=n, s=s, s_tilde=len(frontier), points=tuple(frontier))


def exact_period_counts(tower: ComplexTower, n: int) -> dict[int, int]:
    """Weighted number of fixed points of f^n of each exact period t | n."""
    level, _ = resolve_iterate(tower, n)
    periods = divisors(n)
    # f^t(p) and p are compared on levels <= depth - t, t a proper divisor
    largest_proper = periods[-2] if n > 1 else 0
    counts = {t: 0 for t in periods}
    for record in enumerate_fixed_points(tower, n, depth=level + largest_proper):
        p = record.address
        period = next(t for t in divisors(n) if same_point(iterate_map(tower, p, t), p))
        counts[period] += record.weight
    return counts


def moebius_period_count(tower: ComplexTower, n: int, cross_check: bool = True) -> int:
    """p_{n,f}: points of exact period n, from the Moebius inversion formula."""
    if n < 1:
        raise ValueError("period must be at least 1")
    report = analyze_critical(tower.rule)
    if report.has_periodic_critical:
        raise PeriodicCriticalPresent(
            f"periodic critical vertices {[v for v, _ in report.periodic_critical]}"
        )
    d = tower.d
    value = sum(mobius(t) * d ** (n // t) for t in divisors(n))
    if n == 1:
        value += 1
    if cross_check:
        counted = exact_period_counts(tower, n)[n]
        if counted != value:
            raise InconsistentRule(
                f"{counted} enumerated points of exact period {n}, formula gives {value}"
            )
    return value
