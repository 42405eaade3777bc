import os, sys

sys.path.insert(0, os.getcwd())
import argparse


def get_args():
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "--check",
        help="compare the bundled rules with their generators",
        default=False,
        action="store_true",
    )
    parser.add_argument(
        "--checkerboard",
        help="write the a x b checkerboard rule",
        default=None,
        type=int,
        nargs=2,
        metavar=("A", "B"),
    )
    parser.add_argument(
        "--quarter_turn",
        help="write the rule of z -> (-a·y, b·x) on the pillow",
        default=None,
        type=int,
        nargs=2,
        metavar=("A", "B"),
    )
    parser.add_argument(
        "--barycentric",
        help="write the barycentric subdivision rule",
        default=False,
        action="store_true",
    )
    parser.add_argument(
        "--basilica",
        help="write the rule of z^2 - 1 on the real line",
        default=False,
        action="store_true",
    )
    parser.add_argument(
        "--output_dir", help="where generated rules are written", default="./", type=str
    )
    return parser.parse_args()


ARGS = get_args()


from thurston.logging import logger
from thurston.rulekit import (
    dump_rule,
    generate_barycentric,
    generate_basilica,
    generate_checkerboard,
    generate_quarter_turn,
    load_bundled_rule,
    rule_digest,
    save_rule,
    validate_rule,
)


GENERATORS = {
    "lattes2x2": lambda: generate_checkerboard(2, 2),
    "checkerboard3x3": lambda: generate_checkerboard(3, 3),
    "barycentric": generate_barycentric,
}


def check_bundled():
    failed = 0
    for name, generator in GENERATORS.items():
        bundled = load_bundled_rule(name)
        if save_rule(bundled) != save_rule(generator()):
            logger.error(f"{name}: bundled file differs from its generator")
            failed += 1
            continue
        report = validate_rule(bundled)
        if not report.ok:
            logger.error(f"{name}: {', '.join(sorted(report.codes()))}")
            failed += 1
            continue
        logger.info(f"{name}: ok, {rule_digest(bundled)}")
    return failed


def write(rule, name):
    report = validate_rule(rule)
    if not report.ok:
        for v in report:
            logger.warning(str(v))
    path = os.path.join(ARGS.output_dir, f"{name}.rule")
    dump_rule(rule, path)
    logger.info(f"wrote {path} (d={rule.d}, {rule.num_tiles} tiles)")


def main():
    args = ARGS
    os.makedirs(args.output_dir, exist_ok=True)
    if args.checkerboard is not None:
        a, b = args.checkerboard
        write(generate_checkerboard(a, b), f"checkerboard{a}x{b}")
    if args.quarter_turn is not None:
        a, b = args.quarter_turn
        write(generate_quarter_turn(a, b), f"quarter_turn{a}x{b}")
    if args.barycentric:
        write(generate_barycentric(), "barycentric")
    if args.basilica:
        write(generate_basilica(), "basilica")
    if args.check and check_bundled():
        sys.exit(1)


if __name__ == "__main__":
    main()
