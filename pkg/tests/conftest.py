import pytest

from survopt.scenario import build_model, load_bundled

# lines recorded by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def schools():
    return build_model(load_bundled("stratified_schools.json"))


@pytest.fixture(scope="session")
def srs_pops():
    return {
        "I": build_model(load_bundled("srs_pop1.json")),
        "II": build_model(load_bundled("srs_pop2.json")),
    }


@pytest.fixture(scope="session")
def attr_pops():
    return {
        "pop1": build_model(load_bundled("attribute_pop1.json")),
        "pop2": build_model(load_bundled("attribute_pop2.json")),
    }


@pytest.fixture(scope="session")
def two_phase_pops():
    return {
        "pop1": build_model(load_bundled("attribute_twophase_pop1.json")),
        "pop2": build_model(load_bundled("attribute_twophase_pop2.json")),
    }


@pytest.fixture(scope="session")
def eoq_example():
    return build_model(load_bundled("eoq_example.json"))


@pytest.fixture(scope="session")
def horizon_params():
    return build_model(load_bundled("horizon_example1.json"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
