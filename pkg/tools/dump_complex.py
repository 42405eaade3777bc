import os, sys

sys.path.insert(0, os.getcwd())
import argparse


def get_args():
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "rule", help="rule file or bundled rule name", default="", type=str
    )
    parser.add_argument(
        "output_name", help="the output JSON file", default="./complex.json", type=str
    )
    parser.add_argument(
        "--level", help="level of the decomposition to dump", default=2, type=int
    )
    parser.add_argument(
        "--cache_dir",
        help="reuse and fill a complex cache directory",
        default=None,
        type=str,
    )
    parser.add_argument(
        "--progress",
        help="show a progress bar while subdividing",
        default=False,
        action="store_true",
    )
    return parser.parse_args()


ARGS = get_args()


from thurston.complex import ComplexTower, check_complex
from thurston.logging import logger
from thurston.rulekit import resolve_rule
from thurston.utils import canonical_json
from thurston.utils.cache import open_cache


def main():
    args = ARGS
    rule = resolve_rule(args.rule)
    tower = ComplexTower(
        rule,
        level_cap=max(args.level, 1),
        cache=open_cache(args.cache_dir),
        progress=args.progress,
    )
    cx = tower.level(args.level)
    prev = tower.level(args.level - 1) if args.level else None
    problems = check_complex(cx, prev, rule.d)
    for problem in problems:
        logger.warning(problem)
    with open(args.output_name, "w", encoding="utf-8") as f:
        f.write(canonical_json(cx.to_dict()))
    logger.info(
        f"level {args.level}: {cx.num_vertices} vertices, {cx.num_edges} edges, "
        f"{cx.num_tiles} tiles -> {args.output_name}"
    )


if __name__ == "__main__":
    main()
