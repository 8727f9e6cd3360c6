import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rlsa_floorplan.bench import (FixedConfig, apply_fixed, example_fixed_config_path, gen_lattice,
                                  load_yal, ami49_standin_path)


@pytest.fixture(scope="session")
def ami49():
    return load_yal(ami49_standin_path())


@pytest.fixture(scope="session")
def ami49_fixed(ami49):
    return apply_fixed(ami49, FixedConfig.from_json(example_fixed_config_path()))


@pytest.fixture(scope="session")
def lattice2():
    return gen_lattice(2)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
