import pytest

from splitplan.problem import default_instance
from splitplan.profile import BUNDLED_PROFILES, bundled_profile

EXPECTED_LAYERS = {"alexnet": 21, "vgg11": 29, "vgg13": 33, "vgg16": 39, "mobilenetv2": 21}


@pytest.fixture(scope="session")
def profiles():
    return {name: bundled_profile(name) for name in BUNDLED_PROFILES}


@pytest.fixture(scope="session")
def instances(profiles):
    return {name: default_instance(model) for name, model in profiles.items()}


@pytest.fixture(params=BUNDLED_PROFILES)
def bundled_name(request):
    return request.param


def make_instance(model, memory_cap=None, client=None, server=None, network=None):
    """Default reference instance with selected parts swapped out."""
    from dataclasses import replace

    base = default_instance(model)
    return replace(
        base,
        client=client or base.client,
        server=server or base.server,
        network=network or base.network,
        memory_cap=base.memory_cap if memory_cap is None else memory_cap,
    )


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def report(number, title, passed, detail=""):
    line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
