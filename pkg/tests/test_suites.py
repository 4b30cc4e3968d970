import pytest

from residuekit.exactnum import Field
from residuekit.suites import SUITES, SuiteConfig, run_case, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_each_suite_small_run(name):
    results = run_suite(name, 11, 4)
    assert [r.index for r in results] == [0, 1, 2, 3]
    assert all(r.passed for r in results), [r.as_dict() for r in results if not r.passed]


def test_cases_replay_independently():
    full = run_suite("fubini", 2, 5)
    assert run_case("fubini", 2, 3).as_dict() == full[3].as_dict()


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_over_prime_field(name):
    config = SuiteConfig(field=Field(10007))
    assert all(r.passed for r in run_suite(name, 1, 5, config))
