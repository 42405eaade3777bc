from .rule import (
    WHITE,
    BLACK,
    COLOR_NAMES,
    TILE_CLASSES,
    SchemaError,
    DegenerateRule,
    InconsistentRule,
    EdgeRecord,
    TileRecord,
    CurveChain,
    SubdivisionRule,
    RuleStats,
    tile_class,
    curve_winding,
    rule_stats,
    build_rule,
)
from .io import (
    parse_rule,
    save_rule,
    rule_to_dict,
    rule_digest,
    load_rule,
    dump_rule,
    bundled_rule_path,
    load_bundled_rule,
    resolve_rule,
)
from .validate import Violation, ValidationReport, validate_rule
from .generate import (
    generate_checkerboard,
    generate_quarter_turn,
    generate_barycentric,
    generate_basilica,
)
