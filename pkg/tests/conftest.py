import numpy as np
import pytest


@pytest.fixture
def walk_trace(tmp_path):
    """A bounded random-walk light trace written one sample per line."""
    rng = np.random.default_rng(1)
    walk = np.clip(np.cumsum(rng.integers(-3, 4, 2000)) + 120, 0, 255)
    path = tmp_path / "walk.csv"
    path.write_text("\n".join(map(str, walk)) + "\n")
    return path


@pytest.fixture
def flat_histogram(tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("symbol,count\n" + "".join(f"{s},1\n" for s in range(256)))
    return path


@pytest.fixture
def skewed_histogram(tmp_path):
    """Peaked histogram with 256 total counts, centred away from zero."""
    counts = {150: 80, 151: 60, 149: 40, 152: 30, 148: 20, 153: 12, 147: 8, 200: 4, 10: 2}
    assert sum(counts.values()) == 256
    path = tmp_path / "skewed.csv"
    path.write_text("symbol,count\n" + "".join(f"{s},{c}\n" for s, c in counts.items()))
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
