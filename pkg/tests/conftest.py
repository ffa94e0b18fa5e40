import sys
from importlib import resources
from pathlib import Path

import pytest

from prscore import ClassScheme, Dataset, ThresholdSummary, rank, reconstruct

sys.path.insert(0, str(Path(__file__).parent))

import corpus  # noqa: E402

FIXTURES = resources.files("prscore") / "fixtures"

D1_COUNTS = [0, 0, 1, 1, 1, 1, 2, 3, 4, 5]


def load_fixture_summary(k: int, strict: bool = True) -> ThresholdSummary:
    return ThresholdSummary.from_json((FIXTURES / f"table{k}.json").read_text(), strict=strict)


def fixture_ranked(k: int):
    """Ranked reconstruction of published table k (Table 3 needs lenient parsing)."""
    strict = k != 3
    return rank(reconstruct(load_fixture_summary(k, strict), strict=strict))


@pytest.fixture
def default6():
    return ClassScheme.default()


@pytest.fixture
def d1():
    return Dataset.from_counts(D1_COUNTS)


@pytest.fixture(scope="session")
def random_corpus():
    """1000 heavy-tailed datasets (n in [1, 5000]) ranked once, with 50 class schemes."""
    ranked = [rank(d) for d in corpus.datasets(1000, 5000)]
    return ranked, corpus.class_schemes(50)


# ---------------------------------------------------------------- acceptance summary

_criteria: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _criteria.setdefault(marker.args[0], []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        results = _criteria[n]
        failed = [name for name, outcome in results if outcome != "passed"]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {n}: {status} ({len(results) - len(failed)}/{len(results)} checks passed)"
        if failed:
            line += "; failing: " + ", ".join(failed)
        terminalreporter.write_line(line)
