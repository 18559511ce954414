import pytest

from seisnet.crosslayer import DesignParams, TechnologyEntry, Band

MID = DesignParams(efficiency=0.9, frame_len=128, trigger_payload=216_000, delay_budget=36_000,
                   duty_cycle=0.01, split_ratio=1, frame_error_rate=0.01)
TRIGGERS_PER_SECOND = 500 / (365 * 86_400)


@pytest.fixture
def mid():
    return MID


@pytest.fixture
def catalog():
    return [TechnologyEntry("LoRa", 50_000, 0.121, Band.UNLICENSED, False),
            TechnologyEntry("NB-IoT", 200_000, 1.0, Band.LICENSED, True)]


ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")


# Property-suite outcomes from this session, keyed by test function name.
PROPERTY_OUTCOMES: dict[str, list[str]] = {}


def pytest_collection_modifyitems(items):
    # acceptance last, so it can reuse property-suite results from the same run
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_properties.py" in report.nodeid:
        name = report.nodeid.split("::")[1].split("[")[0]
        PROPERTY_OUTCOMES.setdefault(name, []).append(report.outcome)
