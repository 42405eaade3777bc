"""``thurston`` command line: reports, experiment series and the complex cache.

Exit codes: 0 success, 1 rule violations or domain errors, 2 usage errors,
3 IO errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, TextIO

from .coding import (
    shift,
    tile_to_word,
    word_from_string,
    word_to_preimage,
    word_to_tile,
)
from .complex import (
    EDGE,
    TILE,
    VERTEX,
    CellRef,
    ComplexTower,
    check_complex,
    cover_growth,
    find_expansion_level,
    iterate_rule,
    tile_class_counts,
)
from .config import cache_dir_from_env
from .config_sdk import (
    ConfigValidationError,
    RunConfig,
    describe_command,
)
from .dynamics import analyze_critical, generic_point
from .logging import logger, set_verbosity
from .measure import (
    EQUIDIST_KINDS,
    TileMeasure,
    compare,
    degree_sum_bound_check,
    equidist_measure,
    iter_backward_orbit,
    mome,
    run_backward_orbit,
    tv_threshold,
)
from .periodic import (
    circle_analysis,
    enumerate_fixed_points,
    moebius_period_count,
    preperiodic_census,
)
from .rulekit import (
    COLOR_NAMES,
    SchemaError,
    SubdivisionRule,
    dump_rule,
    resolve_rule,
    rule_stats,
    save_rule,
    validate_rule,
)
from .utils import canonical_json
from .utils.cache import ComplexCache, open_cache
from .utils.general import ThurstonError
from .utils.report import Table, write_table, write_tables
from .utils.rng import OrbitRng


EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
EXPERIMENT_SERIES = ("equidist", "cover-edge", "sampler", "preperiodic")


@dataclass
class CommandResult:
    tables: list[Table] = field(default_factory=list)
    code: int = EXIT_OK
    raw: Optional[str] = None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got '{text}'")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run config", default=None, type=str)
    common.add_argument(
        "--format", dest="output_format", choices=("tsv", "json", "csv"), default=None
    )
    common.add_argument(
        "--float", dest="float_columns", help="add decimal columns", action="store_true", default=None
    )
    common.add_argument("--cache-dir", dest="cache_dir", default=None, type=str)
    common.add_argument("--level-cap", dest="level_cap", default=None, type=int)
    common.add_argument("--depth-cap", dest="depth_cap", default=None, type=int)
    common.add_argument("--seed", default=None, type=int)
    common.add_argument(
        "--stats", help="print build and cache counters to stderr", action="store_true", default=None
    )
    common.add_argument("--progress", action="store_true", default=None)
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", default=False)
    verbosity.add_argument("--quiet", "-q", action="store_true", default=False)
    return common


def get_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="thurston",
        description="Exact combinatorics of expanding Thurston maps given by subdivision rules",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=describe_command(name).description, parents=[common])
        p.add_argument("rule", help="rule file or bundled rule name", nargs="?", default=None)
        return p

    command("validate")
    command("info")
    command("critical")
    command("circle")

    p = command("subdivide")
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--counts", action="store_true", default=None)
    p.add_argument("--check", action="store_true", default=None)
    p.add_argument("--dump", help="write the complex as JSON", default=None, type=str)

    p = command("check")
    p.add_argument("--level", type=int, default=None)

    p = command("cover-edge")
    p.add_argument("--edge", type=int, default=None, help="edge id at --edge-level")
    p.add_argument("--edge-level", dest="edge_level", type=int, default=None)
    p.add_argument("--k", type=int, default=None)

    p = command("expansion")
    p.add_argument("--max-n", dest="max_n", type=int, default=None)

    p = command("iterate")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--output", "-o", default=None, type=str)

    p = command("fixed-points")
    p.add_argument("--iterate", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)

    p = command("preperiodic")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)

    p = command("moebius")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--no-cross-check", dest="cross_check", action="store_false", default=None)

    p = command("bound")
    p.add_argument("--level", type=int, default=None)

    p = command("mome")
    p.add_argument("--level", type=int, default=None)

    p = command("equidist")
    p.add_argument("--kind", choices=EQUIDIST_KINDS, default=None)
    p.add_argument("--i", type=int, default=None)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)

    p = command("sample")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--window", type=int, default=None)

    p = command("code")
    p.add_argument("--word", default=None, type=str)
    p.add_argument("--level", type=int, default=None)

    p = command("experiment")
    p.add_argument("--series", choices=EXPERIMENT_SERIES, default=None)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--checkpoints", type=_int_list, default=None)
    p.add_argument("--seeds", type=int, default=None)

    p = command("cache")
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--clear", action="store_true", default=None)
    return parser


GLOBAL_FLAGS = (
    "output_format",
    "float_columns",
    "cache_dir",
    "level_cap",
    "depth_cap",
    "seed",
    "stats",
    "progress",
)


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults < TOML file < environment (cache dir) < explicit flags."""
    base = RunConfig.from_toml(args.config) if args.config else RunConfig()
    if base.command is not None and base.command != args.command:
        raise ConfigValidationError(
            f"config file is for command '{base.command}', not '{args.command}'"
        )
    spec = describe_command(args.command)
    overrides = {key: getattr(args, key) for key in GLOBAL_FLAGS}
    if overrides["cache_dir"] is None:
        overrides["cache_dir"] = cache_dir_from_env()
    overrides["rule_path"] = args.rule
    overrides["command"] = args.command
    overrides["options"] = {
        key: getattr(args, key) for key in spec.supported_options if hasattr(args, key)
    }
    config = base.merged(overrides)
    config.validate()
    return config


def _opt(config: RunConfig, key: str, default):
    value = config.options.get(key)
    return default if value is None else value


def _positive(config: RunConfig, key: str, default: int, minimum: int = 1) -> int:
    value = _opt(config, key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigValidationError(f"--{key.replace('_', '-')} must be an integer >= {minimum}")
    return value


def _depth(config: RunConfig, key: str = "depth") -> Optional[int]:
    depth = config.options.get(key)
    if depth is not None and depth > config.depth_cap:
        raise ConfigValidationError(f"depth {depth} exceeds the depth cap {config.depth_cap}")
    return depth


def _violations_table(report) -> Table:
    table = Table(("code", "message", "cells"), title="violations")
    for v in report:
        table.add(v.code, v.message, v.cells)
    return table


def cmd_validate(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    report = validate_rule(rule)
    code = EXIT_OK if report.ok else EXIT_VIOLATION
    return CommandResult([_violations_table(report)], code)


def cmd_info(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    stats = rule_stats(rule)
    table = Table(("quantity", "value"), title="rule statistics")
    table.extend(
        [
            ("m", rule.m),
            ("d", rule.d),
            ("vertices", rule.num_vertices),
            ("edges", rule.num_edges),
            ("tiles", rule.num_tiles),
            *stats.class_counts().items(),
            ("w", stats.w),
            ("b", stats.b),
            ("deg_on_curve", stats.deg_on_curve),
            ("eigenvalue", stats.eigenvalue),
            ("entropy", stats.entropy_log_base_e),
            ("digest", tower.digest),
        ]
    )
    return CommandResult([table])


def cmd_critical(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    report = analyze_critical(rule)
    periods = dict(report.periodic_critical)
    zero = {rule.zero_vertex(j): j for j in range(rule.m)}
    critical = Table(("vertex", "label", "degree", "postcritical", "period"), title="critical vertices")
    for v, deg in report.critical_vertices:
        critical.add(v, rule.vertex_labels[v], deg, zero.get(v, "-"), periods.get(v, "-"))
    orbits = Table(("zero_vertex", "orbit"), title=f"postcritical orbits, kappa = {report.kappa}")
    for j, orbit in report.postcritical_orbits.items():
        orbits.add(j, orbit)
    return CommandResult([critical, orbits])


def cmd_subdivide(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    level = _positive(config, "level", 1, minimum=0)
    tables = []
    code = EXIT_OK
    if _opt(config, "check", False):
        result = cmd_check(config, rule, tower)
        tables.extend(result.tables)
        code = result.code
    cx = tower.level(level)
    if _opt(config, "counts", True) or not tables:
        table = Table(
            ("level", "vertices", "edges", "tiles", "euler", "ww", "wb", "bw", "bb"),
            title="cell counts",
        )
        for n in range(level + 1):
            c = tower.level(n)
            classes = tile_class_counts(c) if n else dict.fromkeys(("ww", "wb", "bw", "bb"), "-")
            table.add(
                n, c.num_vertices, c.num_edges, c.num_tiles, c.euler_characteristic(), *classes.values()
            )
        tables.append(table)
    dump = config.options.get("dump")
    if dump:
        with open(dump, "w", encoding="utf-8") as f:
            f.write(canonical_json(cx.to_dict()))
        logger.info(f"wrote level {level} to {dump}")
    return CommandResult(tables, code)


def cmd_check(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    level = _positive(config, "level", 1)
    table = Table(("level", "problem"), title="complex checks")
    for n in range(level + 1):
        prev = tower.level(n - 1) if n else None
        for problem in check_complex(tower.level(n), prev, rule.d):
            table.add(n, problem)
    return CommandResult([table], EXIT_VIOLATION if table.rows else EXIT_OK)


def cmd_cover_edge(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    edge_level = _positive(config, "edge_level", 0, minimum=0)
    edge = _positive(config, "edge", 0, minimum=0)
    k = _positive(config, "k", 3, minimum=0)
    if edge >= tower.level(edge_level).num_edges:
        raise ConfigValidationError(f"there is no edge {edge} at level {edge_level}")
    e = CellRef(edge_level, EDGE, edge)
    table = Table(("k", "card", "normalized", "growth", "contained"), title=f"covers of edge {e}")
    previous = None
    for report in cover_growth(tower, e, range(k + 1)):
        growth = Fraction(report.card, previous) if previous else "-"
        table.add(report.k, report.card, report.normalized(tower.d), growth, report.contained)
        previous = report.card
    code = EXIT_OK if all(table.column("contained")) else EXIT_VIOLATION
    return CommandResult([table], code)


def cmd_expansion(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    max_n = _positive(config, "max_n", config.level_cap)
    level = find_expansion_level(tower, max_n)
    table = Table(("max_n", "expansion_level"), title="combinatorial expansion")
    table.add(max_n, "none" if level is None else level)
    return CommandResult([table], EXIT_VIOLATION if level is None else EXIT_OK)


def cmd_iterate(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    n = _positive(config, "n", 2)
    iterate = iterate_rule(rule, n, tower=tower)
    output = config.options.get("output")
    if output:
        dump_rule(iterate, output)
        table = Table(("n", "d", "tiles", "output"), title="iterate")
        table.add(n, iterate.d, iterate.num_tiles, output)
        return CommandResult([table])
    return CommandResult(raw=save_rule(iterate))


def cmd_circle(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    analysis = circle_analysis(tower)
    sites = Table(("cell", "orientation"), title="fixed sites of f on C")
    for site in analysis.fixed_sites:
        sites.add(str(site.cell), site.orientation)
    summary = Table(("preserve", "reverse", "fold", "signed", "deg_on_curve_minus_1"), title="summary")
    summary.add(
        analysis.count("preserve"),
        analysis.count("reverse"),
        analysis.count("fold"),
        analysis.signed_count,
        analysis.degree_on_curve - 1,
    )
    return CommandResult([sites, summary])


def cmd_fixed_points(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    n = _positive(config, "iterate", 1)
    records = enumerate_fixed_points(tower, n, _depth(config))
    points = Table(("address", "weight", "locus", "witness"), title=f"fixed points of f^{n}")
    for r in records:
        points.add(str(r.address), r.weight, r.locus, [str(w) for w in r.witness])
    total = Table(("points", "total_weight", "expected"), title="total")
    total.add(len(records), sum(r.weight for r in records), 1 + tower.d**n)
    return CommandResult([points, total])


def cmd_preperiodic(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    n = _positive(config, "n", 2)
    m = _positive(config, "m", 0, minimum=0)
    census = preperiodic_census(tower, m, n, _depth(config))
    table = Table(("m", "n", "s", "s_tilde", "ratio", "expected_s"), title="preperiodic census")
    table.add(m, n, census.s, census.s_tilde, Fraction(census.s_tilde, census.s), tower.d**n + tower.d**m)
    return CommandResult([table])


def cmd_moebius(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    n = _positive(config, "n", 1)
    cross_check = _opt(config, "cross_check", True)
    table = Table(("n", "exact_period_count"), title="Moebius period counts")
    for t in range(1, n + 1):
        table.add(t, moebius_period_count(tower, t, cross_check=cross_check))
    return CommandResult([table])


def cmd_bound(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    n = _positive(config, "level", 1, minimum=0)
    vertices = list(tower.level(n).cells(VERTEX))
    report = degree_sum_bound_check(tower, vertices, n)
    table = Table(
        ("n", "card", "lhs", "ratio", "case", "constant", "alpha", "rhs", "holds"),
        title="degree-sum bound",
    )
    table.add(
        report.n,
        report.card,
        report.lhs,
        report.ratio,
        report.case,
        report.constant,
        report.alpha,
        report.rhs,
        report.holds,
    )
    return CommandResult([table], EXIT_OK if report.holds else EXIT_VIOLATION)


def _measure_table(tower: ComplexTower, level: int, columns: dict[str, TileMeasure], title: str) -> Table:
    cx = tower.level(level)
    names = list(columns)
    table = Table(("tile", "color", *names), title=title)
    for t in range(cx.num_tiles):
        table.add(t, COLOR_NAMES[cx.color(t)], *(columns[k].masses[t] for k in names))
    table.add("skeleton", "-", *(columns[k].skeleton_mass for k in names))
    return table


def cmd_mome(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    level = _positive(config, "level", 1, minimum=0)
    mu = mome(tower, level)
    table = _measure_table(tower, level, {"mass": mu}, f"measure of maximal entropy, level {level}")
    total = Table(("level", "total"), title="total")
    total.add(level, mu.total)
    return CommandResult([table, total])


def _comparison_tables(tower, level, empirical: TileMeasure, title: str, extra=()) -> list[Table]:
    mu = mome(tower, level)
    report = compare(tower, empirical, mu, level)
    table = _measure_table(tower, level, {"measure": empirical, "mome": mu}, title)
    summary = Table(("level", "tv", "max_deviation", "skeleton_difference", *(k for k, _ in extra)), title="comparison")
    summary.add(level, report.tv, report.max_deviation, report.skeleton_difference, *(v for _, v in extra))
    return [table, summary]


def cmd_equidist(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    kind = _opt(config, "kind", "preimage-weighted")
    level = _positive(config, "level", 1, minimum=0)
    if kind.startswith("preimage"):
        i = _positive(config, "i", level + 1, minimum=0)
        measure = equidist_measure(tower, kind, i=i, depth=max(0, level - i))
        title = f"{kind} measure, i = {i}"
    else:
        n = _positive(config, "n", 2)
        m = _positive(config, "m", 0, minimum=0)
        measure = equidist_measure(tower, kind, m=m, n=n, depth=level)
        title = f"{kind} measure, m = {m}, n = {n}"
    return CommandResult(_comparison_tables(tower, level, measure.evaluate(tower, level), title))


def _window(config: RunConfig, level: int) -> int:
    window = _positive(config, "window", level, minimum=level)
    return min(window, config.depth_cap, config.level_cap - 1)


def cmd_sample(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    steps = _positive(config, "steps", 10000)
    level = _positive(config, "level", 1, minimum=0)
    window = _window(config, level)
    z = generic_point(tower, window)
    empirical = run_backward_orbit(tower, z, steps, config.seed, window, config.progress)
    cells = tower.level(level).num_tiles
    threshold = tv_threshold(cells, steps)
    tables = _comparison_tables(
        tower,
        level,
        empirical.evaluate(tower, level),
        f"backward orbit, {steps} steps, seed {config.seed}",
        extra=(("threshold", threshold),),
    )
    return CommandResult(tables)


def cmd_code(config: RunConfig, rule: SubdivisionRule, tower: ComplexTower) -> CommandResult:
    text = config.options.get("word")
    if text is None:
        raise ConfigValidationError("code needs --word")
    word = word_from_string(text, tower.d)
    tile = word_to_tile(tower, word)
    level = _positive(config, "level", len(word), minimum=0)
    if level > len(word):
        raise ConfigValidationError(f"--level {level} is finer than the word length {len(word)}")
    point = word_to_preimage(tower, word, generic_point(tower))
    table = Table(("word", "tile", "ancestor", "image_word", "preimage"), title="coding")
    image = str(shift(word)) if len(word) else "-"
    table.add(str(word), str(tile), str(tower.ancestor(tile, level)), image, str(point))
    if tile_to_word(tower, tile) != word:
        raise ThurstonError(f"tile {tile} decodes to a different word")
    return CommandResult([table])


def cmd_report(config: RunConfig, stream: TextIO) -> int:
    """Load, validate and dispatch a report command."""
    rule = resolve_rule(config.rule_path)
    if config.command != "validate":
        report = validate_rule(rule)
        if not report.ok:
            logger.error(f"rule is invalid: {', '.join(sorted(report.codes()))}")
            write_table(_violations_table(report), config.output_format, stream)
            return EXIT_VIOLATION
    tower = _tower(config, rule)
    result = REPORT_COMMANDS[config.command](config, rule, tower)
    _emit(config, result, stream)
    _report_stats(config, tower)
    return result.code


def _equidist_series(config, tower) -> Table:
    level = _positive(config, "level", 1, minimum=0)
    count = _positive(config, "count", 4)
    mu = mome(tower, level)
    table = Table(("i", "tv", "max_deviation"), title="preimage equidistribution")
    for i in range(level, level + count + 1):
        nu = equidist_measure(tower, "preimage-weighted", i=i, depth=max(0, level - i))
        report = compare(tower, nu, mu, level)
        table.add(i, report.tv, report.max_deviation)
    return table


def _cover_edge_series(config, tower) -> Table:
    count = _positive(config, "count", 3, minimum=0)
    table = Table(("edge", "k", "card", "normalized"), title="edge covers")
    for j in range(tower.m):
        for report in cover_growth(tower, CellRef(0, EDGE, j), range(count + 1)):
            table.add(j, report.k, report.card, report.normalized(tower.d))
    return table


def _checkpoints(config, steps: int) -> list[int]:
    points = config.options.get("checkpoints")
    if not points:
        points = [10**k for k in range(1, len(str(steps))) if 10**k < steps]
    return sorted({p for p in points if 0 < p <= steps} | {steps})


def _sampler_series(config, tower) -> Table:
    level = _positive(config, "level", 1, minimum=0)
    steps = _positive(config, "steps", 10000)
    seeds = _positive(config, "seeds", 1)
    window = _window(config, level)
    checkpoints = set(_checkpoints(config, steps))
    mu = mome(tower, level)
    cells = tower.level(level).num_tiles
    table = Table(("chain", "steps", "tv", "threshold"), title="backward orbit convergence")
    for chain in range(seeds):
        rng = OrbitRng.for_path(config.seed, "sampler", chain)
        counts = [0] * cells
        skeleton = 0
        orbit = iter_backward_orbit(
            tower, generic_point(tower, window), steps, rng, window, config.progress
        )
        for j, q in enumerate(orbit, start=1):
            cell = q.cells[level]
            if cell.dim == TILE:
                counts[cell.id] += 1
            else:
                skeleton += 1
            if j in checkpoints:
                empirical = TileMeasure(
                    level, tuple(Fraction(c, j) for c in counts), Fraction(skeleton, j)
                )
                table.add(chain, j, compare(tower, empirical, mu, level).tv, tv_threshold(cells, j))
    return table


def _preperiodic_series(config, tower) -> Table:
    count = _positive(config, "count", 3)
    table = Table(("m", "n", "s", "s_tilde", "ratio"), title="preperiodic census")
    for n in range(1, count + 1):
        for m in range(n):
            census = preperiodic_census(tower, m, n)
            table.add(m, n, census.s, census.s_tilde, Fraction(census.s_tilde, census.s))
    return table


SERIES: dict[str, Callable] = {
    "equidist": _equidist_series,
    "cover-edge": _cover_edge_series,
    "sampler": _sampler_series,
    "preperiodic": _preperiodic_series,
}


def cmd_experiment(config: RunConfig, stream: TextIO) -> int:
    """Series for external plotting; deterministic under a fixed seed."""
    series = _opt(config, "series", "equidist")
    if series not in SERIES:
        raise ConfigValidationError(f"unknown series '{series}', expected one of {EXPERIMENT_SERIES}")
    rule = resolve_rule(config.rule_path)
    report = validate_rule(rule)
    if not report.ok:
        logger.error(f"rule is invalid: {', '.join(sorted(report.codes()))}")
        return EXIT_VIOLATION
    tower = _tower(config, rule)
    _emit(config, CommandResult([SERIES[series](config, tower)]), stream)
    _report_stats(config, tower)
    return EXIT_OK


def cmd_cache(config: RunConfig, stream: TextIO) -> int:
    root = config.resolved_cache_dir()
    if not root:
        raise ConfigValidationError("cache needs --cache-dir or the THURSTON_CACHE variable")
    cache = ComplexCache(root)
    if _opt(config, "clear", False):
        table = Table(("directory", "removed"), title="cache cleared")
        table.add(root, cache.clear())
        _emit(config, CommandResult([table]), stream)
        if config.rule_path is None:
            return EXIT_OK
    if config.rule_path is None:
        raise ConfigValidationError("cache needs a rule to precompute")
    rule = resolve_rule(config.rule_path)
    level = _positive(config, "level", 3)
    tower = ComplexTower(rule, level_cap=max(level, config.level_cap), cache=cache, progress=config.progress)
    table = Table(("level", "tiles", "entry"), title=f"cached complexes of {tower.digest}")
    for n in range(1, level + 1):
        cx = tower.level(n)
        table.add(n, cx.num_tiles, cache.path(tower.digest, n))
    _emit(config, CommandResult([table]), stream)
    _report_stats(config, tower)
    return EXIT_OK


REPORT_COMMANDS: dict[str, Callable[..., CommandResult]] = {
    "validate": cmd_validate,
    "info": cmd_info,
    "critical": cmd_critical,
    "subdivide": cmd_subdivide,
    "check": cmd_check,
    "cover-edge": cmd_cover_edge,
    "expansion": cmd_expansion,
    "iterate": cmd_iterate,
    "circle": cmd_circle,
    "fixed-points": cmd_fixed_points,
    "preperiodic": cmd_preperiodic,
    "moebius": cmd_moebius,
    "bound": cmd_bound,
    "mome": cmd_mome,
    "equidist": cmd_equidist,
    "sample": cmd_sample,
    "code": cmd_code,
}


def _tower(config: RunConfig, rule: SubdivisionRule) -> ComplexTower:
    return ComplexTower(
        rule,
        level_cap=config.level_cap,
        cache=open_cache(config.resolved_cache_dir()),
        progress=config.progress,
    )


def _emit(config: RunConfig, result: CommandResult, stream: TextIO) -> None:
    if result.raw is not None:
        stream.write(result.raw)
    if result.tables:
        write_tables(result.tables, config.output_format, stream, config.float_columns)


def _report_stats(config: RunConfig, tower: ComplexTower) -> None:
    if not config.stats:
        return
    table = Table(("counter", "value"), title="stats")
    counters = dict(tower.counters)
    if tower.cache is not None:
        counters.update({f"cache_{k}": v for k, v in tower.cache.counters.items()})
    for key in sorted(counters):
        table.add(key, counters[key])
    write_table(table, "tsv", sys.stderr)


def run(config: RunConfig, stream: TextIO) -> int:
    if config.command == "experiment":
        return cmd_experiment(config, stream)
    if config.command == "cache":
        return cmd_cache(config, stream)
    if config.rule_path is None:
        raise ConfigValidationError(f"{config.command} needs a rule file or bundled rule name")
    return cmd_report(config, stream)


def main(argv: Optional[Sequence[str]] = None, stream: Optional[TextIO] = None) -> int:
    stream = sys.stdout if stream is None else stream
    parser = get_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    set_verbosity(args.verbose, args.quiet)
    try:
        config = build_config(args)
        return run(config, stream)
    except ConfigValidationError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except (ThurstonError, SchemaError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_VIOLATION
    except OSError as e:
        logger.error(f"IO error: {e}")
        return EXIT_IO
    except ValueError as e:
        logger.error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
