from . import rulekit, utils

from .config_sdk import (
    RunConfig,
    CommandSpec,
    describe_command,
    list_commands,
    ConfigValidationError,
)
from .config import list_bundled_rules

from .rulekit import (
    SubdivisionRule,
    RuleStats,
    parse_rule,
    save_rule,
    load_rule,
    load_bundled_rule,
    resolve_rule,
    rule_stats,
    validate_rule,
    generate_checkerboard,
    generate_quarter_turn,
    generate_barycentric,
    generate_basilica,
)
from .complex import CellRef, CellComplex, ComplexTower, subdivide, iterate_rule
from .dynamics import PointAddress, preimages, analyze_critical
from .periodic import (
    enumerate_fixed_points,
    circle_analysis,
    preperiodic_census,
    moebius_period_count,
)
from .measure import (
    TileMeasure,
    EmpiricalMeasure,
    mome,
    apply_Q,
    apply_Q_star,
    equidist_measure,
    compare,
    run_backward_orbit,
    degree_sum_bound_check,
)
from .coding import Word, CodingTable, word_to_tile, word_to_preimage, cylinder_pushforward

from .logging import logger


__version__ = "0.3.0"
