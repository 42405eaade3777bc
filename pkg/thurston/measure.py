from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

from tqdm import tqdm

from .complex import TILE, VERTEX, CellRef, ComplexTower, iterate_rule
from .dynamics import PointAddress, analyze_critical, generic_point, preimages
from .logging import logger
from .periodic import preperiodic_census
from .rulekit import WHITE
from .utils.general import ThurstonError
from .utils.rng import OrbitRng


EQUIDIST_KINDS = (
    "preimage-weighted",
    "preimage-plain",
    "preperiodic-weighted",
    "preperiodic-plain",
)
ZERO = Fraction(0)


class DepthBudgetExceeded(ThurstonError):
    pass


@dataclass(frozen=True)
class TileMeasure:
    level: int
    masses: tuple[Fraction, ...]
    skeleton_mass: Fraction = ZERO

    @property
    def total(self) -> Fraction:
        return sum(self.masses, ZERO) + self.skeleton_mass

    def mass(self, tile: int) -> Fraction:
        return self.masses[tile]

    def coarsen(self, tower: ComplexTower, level: int) -> "TileMeasure":
        """Push masses up to the ancestor tiles at a coarser level."""
        if level > self.level:
            raise ValueError(f"cannot refine a level-{self.level} measure to level {level}")
        masses = list(self.masses)
        for lvl in range(self.level, level, -1):
            cx = tower.level(lvl)
            coarse = [ZERO] * tower.level(lvl - 1).num_tiles
            for t, mass in enumerate(masses):
                coarse[cx.parent[TILE][t][1]] += mass
            masses = coarse
        return TileMeasure(level, tuple(masses), self.skeleton_mass)


@dataclass(frozen=True)
class StepFunction:
    level: int
    values: tuple[Fraction, ...]

    @classmethod
    def constant(cls, tower: ComplexTower, level: int, value=1) -> "StepFunction":
        return cls(level, (Fraction(value),) * tower.level(level).num_tiles)

    def integral(self, mu: TileMeasure) -> Fraction:
        if mu.level != self.level:
            raise ValueError("step function and measure live on different levels")
        return sum((v * m for v, m in zip(self.values, mu.masses)), ZERO)


@dataclass(frozen=True)
class EmpiricalMeasure:
    atoms: tuple[tuple[PointAddress, Fraction], ...]

    @property
    def total(self) -> Fraction:
        return sum((w for _, w in self.atoms), ZERO)

    def evaluate(self, tower: ComplexTower, level: int) -> TileMeasure:
        """Book every atom on its level-m minimal cell; skeleton atoms stay apart."""
        masses = [ZERO] * tower.level(level).num_tiles
        skeleton = ZERO
        for address, weight in self.atoms:
            if address.depth < level:
                raise DepthBudgetExceeded(
                    f"atom of depth {address.depth} cannot be evaluated at level {level}"
                )
            cell = address.cells[level]
            if cell.dim == TILE:
                masses[cell.id] += weight
            else:
                skeleton += weight
        return TileMeasure(level, tuple(masses), skeleton)


@dataclass(frozen=True)
class ComparisonReport:
    level: int
    deviations: tuple[Fraction, ...]
    skeleton_difference: Fraction
    tv: Fraction

    @property
    def max_deviation(self) -> Fraction:
        return max((abs(x) for x in self.deviations), default=ZERO)


@dataclass(frozen=True)
class BoundReport:
    n: int
    card: int
    lhs: Fraction
    ratio: Fraction
    case: int
    constant: float
    alpha: float
    rhs: float
    holds: bool


def mome(tower: ComplexTower, level: int) -> TileMeasure:
    """mu_f on level-m tiles: w·d^-m on white tiles, b·d^-m on black ones."""
    stats = tower.stats
    scale = Fraction(1, tower.d**level)
    white, black = stats.w * scale, stats.b * scale
    cx = tower.level(level)
    return TileMeasure(
        level, tuple(white if c == WHITE else black for c in cx.base[TILE])
    )


def invariance_defect(tower: ComplexTower, level: int) -> tuple[Fraction, ...]:
    """mu_f(f^-1(T)) - mu_f(T) for every level-m tile T."""
    fine = tower.level(level + 1)
    mu_fine = mome(tower, level + 1)
    pulled = [ZERO] * tower.level(level).num_tiles
    for a, mass in enumerate(mu_fine.masses):
        pulled[fine.image[TILE][a]] += mass
    mu = mome(tower, level)
    return tuple(p - q for p, q in zip(pulled, mu.masses))


def apply_Q(tower: ComplexTower, phi: StepFunction) -> StepFunction:
    """(Q phi)(T) = 1/d · sum of phi(parent(T')) over level-(m+1) tiles T' onto T."""
    fine = tower.level(phi.level + 1)
    acc = [ZERO] * tower.level(phi.level).num_tiles
    for a in range(fine.num_tiles):
        acc[fine.image[TILE][a]] += phi.values[fine.parent[TILE][a][1]]
    return StepFunction(phi.level, tuple(x / tower.d for x in acc))


def apply_Q_star(tower: ComplexTower, rho: TileMeasure) -> TileMeasure:
    """rho'(A) = rho(f(A)) / d on level-(m+1) tiles."""
    fine = tower.level(rho.level + 1)
    masses = tuple(rho.masses[fine.image[TILE][a]] / tower.d for a in range(fine.num_tiles))
    return TileMeasure(rho.level + 1, masses, rho.skeleton_mass)


def q_iteration(tower: ComplexTower, phi: StepFunction, n: int) -> list[Fraction]:
    """sup |Q^k phi - integral of phi| for k = 0..n."""
    target = phi.integral(mome(tower, phi.level))
    gaps = []
    for _ in range(n + 1):
        gaps.append(max(abs(v - target) for v in phi.values))
        phi = apply_Q(tower, phi)
    return gaps


def q_star_iteration(tower: ComplexTower, rho: TileMeasure, n: int) -> list[Fraction]:
    """TV distance of (Q*)^k rho to mu_f on rho's own level, k = 0..n."""
    mu = mome(tower, rho.level)
    gaps = []
    current = rho
    for _ in range(n + 1):
        gaps.append(compare(tower, current, mu, rho.level).tv)
        current = apply_Q_star(tower, current)
    return gaps


def _preimage_tree(tower: ComplexTower, p: PointAddress, i: int) -> list[tuple[PointAddress, int]]:
    frontier = [(p, 1)]
    for _ in range(i):
        frontier = [
            (q, weight * deg) for x, weight in frontier for q, deg in preimages(tower, x)
        ]
    return frontier


def equidist_measure(
    tower: ComplexTower,
    kind: str,
    *,
    point: Optional[PointAddress] = None,
    i: Optional[int] = None,
    m: Optional[int] = None,
    n: Optional[int] = None,
    depth: Optional[int] = None,
) -> EmpiricalMeasure:
    """nu_i / nu~_i from iterated preimages, xi_n^m / xi~_n^m from the census."""
    if kind not in EQUIDIST_KINDS:
        raise ValueError(f"unknown kind '{kind}', expected one of {EQUIDIST_KINDS}")
    if kind.startswith("preimage"):
        if i is None or i < 0:
            raise ValueError("preimage measures need i >= 0")
        point = point if point is not None else generic_point(tower, depth or 0)
        tree = _preimage_tree(tower, point, i)
        if kind == "preimage-weighted":
            norm = Fraction(1, tower.d**i)
            atoms = tuple((q, weight * norm) for q, weight in tree)
        else:
            norm = Fraction(1, len(tree))
            atoms = tuple((q, norm) for q, _ in tree)
        return EmpiricalMeasure(atoms)
    if m is None or n is None:
        raise ValueError("preperiodic measures need m and n")
    census = preperiodic_census(tower, m, n, depth)
    if kind == "preperiodic-weighted":
        atoms = tuple((q, Fraction(weight, census.s)) for q, weight in census.points)
    else:
        atoms = tuple((q, Fraction(1, census.s_tilde)) for q, _ in census.points)
    return EmpiricalMeasure(atoms)


def compare(
    tower: ComplexTower,
    a: Union[EmpiricalMeasure, TileMeasure],
    b: TileMeasure,
    level: int,
) -> ComparisonReport:
    """Per-tile deviations a - b and total variation on the level-m algebra."""
    if isinstance(a, EmpiricalMeasure):
        a = a.evaluate(tower, level)
    if a.level != level:
        a = a.coarsen(tower, level)
    if b.level != level:
        b = b.coarsen(tower, level)
    deviations = tuple(x - y for x, y in zip(a.masses, b.masses))
    skeleton = a.skeleton_mass - b.skeleton_mass
    tv = (sum((abs(x) for x in deviations), ZERO) + abs(skeleton)) / 2
    return ComparisonReport(level, deviations, skeleton, tv)


def tv_threshold(cells: int, steps: int) -> float:
    """Acceptance envelope 3·sqrt(cells / steps) for sampler runs."""
    return 3 * math.sqrt(cells / steps)


def markov_step(
    tower: ComplexTower,
    p: PointAddress,
    rng: OrbitRng,
    window: Optional[int] = None,
    memo: Optional[dict] = None,
) -> tuple[PointAddress, OrbitRng]:
    """One preimage drawn with probability deg_f(y)/d; coarsest ``window`` levels kept.

    ``memo`` maps an address to its (truncated preimages, weights) and is
    shared across the steps of one orbit.
    """
    options = memo.get(p) if memo is not None else None
    if options is None:
        if p.depth + 1 > tower.level_cap:
            raise DepthBudgetExceeded(
                f"a preimage of a depth-{p.depth} address needs level {p.depth + 1}, "
                f"cap is {tower.level_cap}"
            )
        found = preimages(tower, p)
        addresses = tuple(
            q.truncate(window) if window is not None and q.depth > window else q
            for q, _ in found
        )
        options = (addresses, tuple(w for _, w in found))
        if memo is not None:
            memo[p] = options
    addresses, weights = options
    return addresses[rng.choose(weights)], rng


def iter_backward_orbit(
    tower: ComplexTower,
    z: PointAddress,
    steps: int,
    rng: OrbitRng,
    window: Optional[int] = None,
    progress: bool = False,
) -> Iterator[PointAddress]:
    """q_0 = z, q_{j+1} drawn from the weighted preimages of q_j."""
    window = z.depth if window is None else window
    if window < z.depth:
        z = z.truncate(window)
    memo = {}
    q = z
    for j in tqdm(range(steps), desc="backward orbit", disable=not progress, leave=False):
        yield q
        if j + 1 < steps:
            q, rng = markov_step(tower, q, rng, window, memo)


def run_backward_orbit(
    tower: ComplexTower,
    z: PointAddress,
    steps: int,
    seed: int,
    window: Optional[int] = None,
    progress: bool = False,
) -> EmpiricalMeasure:
    """Birkhoff average (1/n)·sum of delta at q_0..q_{n-1}; reproducible from seed."""
    if steps < 1:
        raise ValueError("a backward orbit needs at least one step")
    rng = OrbitRng(seed)
    counts = Counter()
    for q in iter_backward_orbit(tower, z, steps, rng, window, progress):
        counts[q] += 1
    logger.debug(f"backward orbit: {steps} steps, {len(counts)} distinct points")
    weight = Fraction(1, steps)
    return EmpiricalMeasure(tuple((q, c * weight) for q, c in counts.items()))


def _degree_product(report) -> int:
    return math.prod(deg for _, deg in report.critical_vertices)


def bound_constants(tower: ComplexTower) -> tuple[int, float, float]:
    """(case, C, alpha) for the degree-sum bound."""
    report = analyze_critical(tower.rule)
    d = tower.d
    degree_product = _degree_product(report)
    if not report.has_periodic_critical:
        return 1, float(degree_product), 1.0
    if all(period == 1 for _, period in report.periodic_critical):
        t0 = len(report.periodic_critical)
        constant = 2 * degree_product * t0 * d**2 / (d - 1)
        return 2, constant, math.log(d / (d - 1), d)
    kappa = report.kappa
    iterate = iterate_rule(tower.rule, kappa, tower=tower)
    dk = d**kappa
    iterated = analyze_critical(iterate)
    degree_product_k = _degree_product(iterated)
    t0 = len(iterated.periodic_critical)
    e_constant = 2 * degree_product_k * t0 * dk**2 / (dk - 1)
    return 3, dk * e_constant, math.log(dk / (dk - 1), dk)


def degree_sum_bound_check(
    tower: ComplexTower, vertices: Iterable[CellRef], n: int
) -> BoundReport:
    """d^-n · sum of deg_{f^n} over M against C·max{(card M/d^n)^alpha, card M/d^n}."""
    vertices = set(vertices)
    if not vertices:
        raise ValueError("the degree-sum bound needs a nonempty finite vertex set")
    cx = tower.level(n)
    for v in vertices:
        if v.dim != VERTEX or v.level != n:
            raise ValueError(f"{v} is not a level-{n} vertex")
    scale = Fraction(1, tower.d**n)
    lhs = sum(cx.local_degree(v.id) for v in vertices) * scale
    ratio = len(vertices) * scale
    case, constant, alpha = bound_constants(tower)
    rhs = constant * max(float(ratio) ** alpha, float(ratio))
    return BoundReport(
        n=n,
        card=len(vertices),
        lhs=lhs,
        ratio=ratio,
        case=case,
        constant=constant,
        alpha=alpha,
        rhs=rhs,
        holds=float(lhs) <= rhs,
    )
