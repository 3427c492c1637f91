import sys

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _reference_noise():
    """Every test starts (and leaves) the noise field at its reference permutation."""
    from procgen.noise import set_noise_seed

    set_noise_seed(None)
    yield
    set_noise_seed(None)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
