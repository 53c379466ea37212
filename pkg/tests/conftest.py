import contextlib
import traceback

import pytest

from momentforge import example_path, load_problem
from momentforge.pipeline import ambient_group, build, symmetry_group

SHIPPED = ("chsh.ncpop", "i3322.ncpop", "chsh_projectors.ncpop")


def pytest_configure(config):
    config._acceptance = {}


class _Recorder:
    def __init__(self, store):
        self.store = store

    @contextlib.contextmanager
    def __call__(self, number, title):
        entry = self.store.setdefault(number, {"title": title, "ok": True, "notes": []})
        try:
            yield
        except BaseException as exc:
            entry["ok"] = False
            last = traceback.format_exception_only(type(exc), exc)[-1].strip()
            entry["notes"].append(last.splitlines()[0][:160])
            raise


@pytest.fixture
def acceptance(request):
    return _Recorder(request.config._acceptance)


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        entry = results[number]
        verdict = "PASS" if entry["ok"] else "FAIL"
        line = f"criterion {number}: {verdict}  {entry['title']}"
        if entry["notes"]:
            line += "  [" + "; ".join(entry["notes"]) + "]"
        terminalreporter.write_line(line)


def _load(name):
    return load_problem(example_path(name))


@pytest.fixture(scope="session")
def chsh():
    return _load("chsh.ncpop")


@pytest.fixture(scope="session")
def i3322():
    return _load("i3322.ncpop")


@pytest.fixture(scope="session")
def projectors():
    return _load("chsh_projectors.ncpop")


@pytest.fixture(scope="session")
def chsh_groups(chsh):
    amb = ambient_group(chsh)
    return amb, symmetry_group(chsh, ambient=amb)


@pytest.fixture(scope="session")
def i3322_groups(i3322):
    amb = ambient_group(i3322)
    return amb, symmetry_group(i3322, ambient=amb)


@pytest.fixture(scope="session")
def i3322_level3(i3322, i3322_groups):
    amb, g = i3322_groups
    return build(i3322, 3, "full", ambient=amb, group=g)
