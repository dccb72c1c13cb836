from pathlib import Path

import pytest

from ontosearch import kernels
from ontosearch.annotate import load_interrogative_rules, load_relation_dict, load_stoplist
from ontosearch.kb import load_kb

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance: list[tuple[str, str, str]] = []


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def sample_kb():
    return load_kb(FIXTURES / "sample_kb.tsv")


@pytest.fixture(scope="session")
def stoplist():
    return load_stoplist()


@pytest.fixture(scope="session")
def rel_dict():
    return load_relation_dict()


@pytest.fixture(scope="session")
def rules():
    return load_interrogative_rules()


@pytest.fixture(params=[b.BACKEND for b in kernels.available])
def backend(request, monkeypatch):
    """Run a test once per available kernel implementation."""
    impl = {b.BACKEND: b for b in kernels.available}[request.param]
    for name in ("term_weights", "doc_norms", "accumulate"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return impl


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    if "acceptance" not in report.keywords:
        return
    doc = report.nodeid.split("::")[-1]
    _acceptance.append((doc, "PASS" if report.passed else "FAIL", report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration in _acceptance:
        terminalreporter.write_line(f"{outcome}  {name}  ({duration:.3f}s)")
