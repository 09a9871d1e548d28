from pathlib import Path

import pytest

from pa_resonances.automorphism import synthesize
from pa_resonances.surface import l_origami, torus

DATA = Path(__file__).resolve().parents[1] / "src" / "pa_resonances" / "data"

CAT = ((2, 1), (1, 1))
L_MATRIX = ((5, 2), (2, 1))


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def cat_map():
    return synthesize(torus(), CAT, 0)


@pytest.fixture(scope="session")
def l_map():
    return synthesize(l_origami(), L_MATRIX, 0)


# acceptance reporting ----------------------------------------------------------

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    k = marker.args[0]
    entry = _CRITERIA.setdefault(k, {"ok": True, "details": []})
    entry["ok"] = entry["ok"] and rep.passed
    entry["details"].extend(v for name, v in item.user_properties if name == "detail")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        entry = _CRITERIA[k]
        details = "; ".join(dict.fromkeys(entry["details"]))
        line = f"criterion {k}: {'PASS' if entry['ok'] else 'FAIL'}"
        terminalreporter.write_line(f"{line} ({details})" if details else line)
