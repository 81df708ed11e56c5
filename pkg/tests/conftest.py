import pytest

from mlagreview.io import load_hospital

_ACCEPTANCE = {}
CRITERIA = {
    1: "worked-example fidelity (exact)",
    2: "formula oracle equivalence (1e-12)",
    3: "Heaviside gating and attacker monotonicity (exact)",
    4: "NC->PC->C monotonicity (exact)",
    5: "sweep shape, 28 runs, byte-identical (exact)",
    6: "borderline linearity and ordering (exact)",
    7: "statistics oracle (1e-12)",
    8: "path enumeration vs exhaustive oracle (exact)",
}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    crit = dict(report.user_properties).get("acceptance")
    if crit is None:
        return
    ok = _ACCEPTANCE.get(crit, True)
    _ACCEPTANCE[crit] = ok and report.passed


@pytest.fixture(autouse=True)
def _tag_acceptance(request, record_property):
    marker = request.node.get_closest_marker("acceptance")
    if marker is not None:
        record_property("acceptance", marker.args[0])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE):
        status = "PASS" if _ACCEPTANCE[crit] else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {crit}: {CRITERIA.get(crit, '')}")


@pytest.fixture(scope="session")
def hospital():
    return load_hospital()
