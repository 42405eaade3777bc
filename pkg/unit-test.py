import unittest
import logging
import coverage

cov = coverage.Coverage()
cov.start()

from thurston.logging import logger

logger.setLevel(logging.ERROR)

from test.rulekit import RuleKitTests
from test.complex import ComplexTests
from test.dynamics import DynamicsTests
from test.periodic import PeriodicTests
from test.measure import MeasureTests
from test.coding import CodingTests
from test.config import RunConfigTests
from test.cli import CliTests


TESTS = [
    RuleKitTests,
    ComplexTests,
    DynamicsTests,
    PeriodicTests,
    MeasureTests,
    CodingTests,
    RunConfigTests,
    CliTests,
]


if __name__ == "__main__":
    test_loader = unittest.TestLoader()
    runner = unittest.TextTestRunner(verbosity=0)
    for test in TESTS:
        suite = test_loader.loadTestsFromTestCase(test)
        result = runner.run(suite)

    cov.stop()
    cov.save()
    cov.report()
    cov.html_report(directory="coverage_report")
