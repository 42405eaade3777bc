import io
import json
import logging
import os
import tempfile
import unittest
from unittest import mock

from parameterized import parameterized

from thurston.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main
from thurston.config import CACHE_ENV_VAR
from thurston.logging import RESET, ColoredFormatter, logger, set_verbosity
from thurston.rulekit import load_bundled_rule, parse_rule, rule_digest, rule_to_dict, validate_rule
from thurston.utils.cache import ComplexCache


def run_cli(*argv: str) -> tuple[int, str]:
    stream = io.StringIO()
    code = main(list(argv) + ["-q"], stream=stream)
    return code, stream.getvalue()


class CliTests(unittest.TestCase):
    def test_info_as_json(self):
        code, out = run_cli("info", "checkerboard3x3", "--format", "json")
        self.assertEqual(code, EXIT_OK)
        data = json.loads(out)
        values = dict(data["rows"])
        self.assertEqual(data["columns"], ["quantity", "value"])
        self.assertEqual(values["d"], 9)
        self.assertEqual(values["ww"], 5)
        self.assertEqual(values["w"], "1/2")
        self.assertEqual(values["deg_on_curve"], 1)
        self.assertEqual(values["digest"], rule_digest(load_bundled_rule("checkerboard3x3")))

    def test_tsv_tables_have_titles(self):
        code, out = run_cli("subdivide", "lattes2x2", "--level", "3")
        self.assertEqual(code, EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[0], "# cell counts")
        self.assertEqual(lines[1].split("\t")[:4], ["level", "vertices", "edges", "tiles"])
        self.assertEqual(lines[-1].split("\t")[:5], ["3", "130", "256", "128", "2"])

    def test_float_columns(self):
        code, out = run_cli("mome", "barycentric", "--level", "1", "--format", "csv", "--float")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("mass,mass_float", out.splitlines()[0])
        self.assertIn("1/12,0.08333333333", out)

    @parameterized.expand(
        [
            (("validate", "barycentric"), EXIT_OK),
            (("check", "checkerboard3x3", "--level", "2"), EXIT_OK),
            (("expansion", "lattes2x2", "--max-n", "3"), EXIT_OK),
            (("circle", "barycentric"), EXIT_OK),
            (("fixed-points", "lattes2x2", "--iterate", "2"), EXIT_OK),
            (("preperiodic", "lattes2x2", "--m", "1", "--n", "2"), EXIT_OK),
            (("moebius", "lattes2x2", "--n", "3"), EXIT_OK),
            (("moebius", "barycentric", "--n", "2"), EXIT_VIOLATION),
            (("bound", "barycentric", "--level", "2"), EXIT_OK),
            (("equidist", "checkerboard3x3", "--level", "1", "--i", "2"), EXIT_OK),
            (("equidist", "lattes2x2", "--kind", "preperiodic-plain", "--m", "1", "--n", "2"), EXIT_OK),
            (("sample", "lattes2x2", "--steps", "100", "--seed", "3"), EXIT_OK),
            (("code", "checkerboard3x3", "--word", "08", "--level", "1"), EXIT_OK),
            (("cover-edge", "lattes2x2", "--edge", "1", "--k", "2"), EXIT_OK),
            (("critical", "barycentric"), EXIT_OK),
            (("info", "no-such-rule.rule"), EXIT_IO),
            (("info",), EXIT_USAGE),
            (("draw", "lattes2x2"), EXIT_USAGE),
            (("info", "lattes2x2", "--level-cap", "0"), EXIT_USAGE),
            (("code", "lattes2x2", "--word", "7"), EXIT_USAGE),
            (("cover-edge", "lattes2x2", "--edge", "99"), EXIT_USAGE),
            (("fixed-points", "lattes2x2", "--depth", "40"), EXIT_USAGE),
        ]
    )
    def test_exit_codes(self, argv, expected):
        code, _ = run_cli(*argv)
        self.assertEqual(code, expected)

    def test_invalid_rule_exits_with_violations(self):
        data = rule_to_dict(load_bundled_rule("lattes2x2"))
        data["tiles"] = data["tiles"][1:]
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "broken.rule")
            with open(path, "w", encoding="utf-8") as f:
                json.dump(data, f)
            code, out = run_cli("validate", path)
            self.assertEqual(code, EXIT_VIOLATION)
            self.assertIn("tile-count", out)
            code, out = run_cli("info", path)
            self.assertEqual(code, EXIT_VIOLATION)
            self.assertIn("color-count", out)

            with open(path, "w", encoding="utf-8") as f:
                f.write("{not json")
            code, _ = run_cli("validate", path)
            self.assertEqual(code, EXIT_VIOLATION)

    def test_iterate_writes_a_rule(self):
        code, out = run_cli("iterate", "lattes2x2", "--n", "2")
        self.assertEqual(code, EXIT_OK)
        iterate = parse_rule(out)
        self.assertEqual(iterate.d, 16)
        self.assertTrue(validate_rule(iterate).ok)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "f2.rule")
            code, out = run_cli("iterate", "lattes2x2", "--n", "2", "-o", path)
            self.assertEqual(code, EXIT_OK)
            code, again = run_cli("info", path)
            self.assertEqual(code, EXIT_OK)
            self.assertIn("d\t16", again)

    def test_cache_is_transparent(self):
        digest = rule_digest(load_bundled_rule("lattes2x2"))
        with tempfile.TemporaryDirectory() as tmp:
            _, fresh = run_cli("subdivide", "lattes2x2", "--level", "3")
            code, first = run_cli("subdivide", "lattes2x2", "--level", "3", "--cache-dir", tmp)
            self.assertEqual(code, EXIT_OK)
            cache = ComplexCache(tmp)
            self.assertEqual(len(cache.entries()), 3)
            _, second = run_cli("subdivide", "lattes2x2", "--level", "3", "--cache-dir", tmp)
            self.assertEqual(fresh, first)
            self.assertEqual(first, second)

            with open(cache.path(digest, 3), "w", encoding="utf-8") as f:
                f.write("{corrupted")
            self.assertIsNone(cache.load(digest, 3))
            self.assertEqual(cache.counters["rebuilds"], 1)
            code, third = run_cli("subdivide", "lattes2x2", "--level", "3", "--cache-dir", tmp)
            self.assertEqual(code, EXIT_OK)
            self.assertEqual(third, first)
            self.assertIsNotNone(cache.load(digest, 3))

    def test_cache_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            root = os.path.join(tmp, "cache")
            with mock.patch.dict(os.environ, {CACHE_ENV_VAR: root}):
                code, out = run_cli("cache", "barycentric", "--level", "2")
                self.assertEqual(code, EXIT_OK)
                self.assertEqual(len(ComplexCache(root).entries()), 2)
                code, out = run_cli("cache", "--clear")
                self.assertEqual(code, EXIT_OK)
                self.assertEqual(ComplexCache(root).entries(), [])
            with mock.patch.dict(os.environ, {CACHE_ENV_VAR: ""}):
                code, _ = run_cli("cache", "barycentric")
                self.assertEqual(code, EXIT_USAGE)

    def test_experiments_are_deterministic(self):
        argv = ("experiment", "lattes2x2", "--series", "sampler", "--steps", "200", "--seeds", "2", "--seed", "5")
        code, first = run_cli(*argv)
        self.assertEqual(code, EXIT_OK)
        _, second = run_cli(*argv)
        self.assertEqual(first, second)
        rows = [line.split("\t") for line in first.splitlines()[2:]]
        self.assertEqual([(r[0], r[1]) for r in rows], [(c, s) for c in "01" for s in ("10", "100", "200")])

    @parameterized.expand([("equidist",), ("cover-edge",), ("preperiodic",)])
    def test_experiment_series(self, series):
        code, out = run_cli("experiment", "lattes2x2", "--series", series, "--count", "2", "--format", "csv")
        self.assertEqual(code, EXIT_OK)
        self.assertGreater(len(out.splitlines()), 2)

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "run.toml")
            with open(path, "w", encoding="utf-8") as f:
                f.write('command = "mome"\noutput_format = "json"\n\n[options]\nlevel = 2\n')
            code, out = run_cli("mome", "lattes2x2", "--config", path)
            self.assertEqual(code, EXIT_OK)
            self.assertIn('"measure of maximal entropy, level 2"', out)
            code, out = run_cli("mome", "lattes2x2", "--config", path, "--level", "0", "--format", "tsv")
            self.assertIn("# measure of maximal entropy, level 0", out)
            code, _ = run_cli("info", "lattes2x2", "--config", path)
            self.assertEqual(code, EXIT_USAGE)


class LoggingTests(unittest.TestCase):
    def record(self, level):
        return logging.LogRecord("thurston", level, __file__, 1, "level %d", (3,), None)

    def test_plain_format(self):
        formatter = ColoredFormatter(use_color=False)
        self.assertEqual(formatter.format(self.record(logging.WARNING)), "thurston: warning: level 3")
        self.assertEqual(formatter.format(self.record(logging.INFO)), "thurston: info: level 3")

    def test_colored_format(self):
        record = self.record(logging.ERROR)
        line = ColoredFormatter(use_color=True).format(record)
        self.assertEqual(line, f"thurston: \033[0;31merror{RESET}: level 3")
        self.assertEqual(record.levelname, "ERROR")
        # info carries no style
        self.assertEqual(ColoredFormatter().format(self.record(logging.INFO)), "thurston: info: level 3")

    def test_set_verbosity(self):
        level = logger.level
        try:
            set_verbosity(verbose=True)
            self.assertEqual(logger.level, logging.DEBUG)
            set_verbosity(verbose=True, quiet=True)
            self.assertEqual(logger.level, logging.ERROR)
            set_verbosity()
            self.assertEqual(logger.level, logging.INFO)
        finally:
            logger.setLevel(level)
