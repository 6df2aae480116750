import pytest

from pmu_bop.core import EventLabel
from pmu_bop.synth import SynthConfig, gen_event


@pytest.fixture(scope="session")
def synth_cfg():
    return SynthConfig()


@pytest.fixture(scope="session")
def fault_record(synth_cfg):
    return gen_event(EventLabel.FAULT, synth_cfg, 11)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
