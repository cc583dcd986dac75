import pytest

from edgerecon.graph import (
    Graph,
    build_graph,
    complete_graph,
    generate_er,
    path_graph,
    star_graph,
)


def bowtie():
    """Two triangles sharing node 2."""
    return Graph.from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])


def diamond():
    """Two triangles sharing the edge (1, 2)."""
    return Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])


MICRO_GRAPHS = {
    "K3": lambda: complete_graph(3),
    "K4": lambda: complete_graph(4),
    "P3": lambda: path_graph(3),
    "P4": lambda: path_graph(4),
    "S4": lambda: star_graph(4),
    "bowtie": bowtie,
    "diamond": diamond,
}


@pytest.fixture(params=sorted(MICRO_GRAPHS))
def micro_graph(request):
    return request.param, MICRO_GRAPHS[request.param]()


@pytest.fixture(scope="session")
def er_small():
    return generate_er(200, 800, seed=3)


@pytest.fixture
def k3():
    return build_graph([("a", "b"), ("b", "c"), ("a", "c")])


# acceptance reporting: one line per criterion in the terminal summary

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.skipped and report.passed):
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    status = "SKIP" if report.skipped else ("PASS" if report.passed else "FAIL")
    prev = _ACCEPTANCE.get(number)
    if prev is None or prev[1] == "PASS":
        _ACCEPTANCE[number] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, detail = _ACCEPTANCE[number]
        line = f"[{status}] criterion {number}: {title}"
        terminalreporter.write_line(f"{line} | {detail}" if detail else line)
