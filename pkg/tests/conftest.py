import numpy as np
import pytest

from fadewm.raster import Precision, RasterImage


def random_image(rng, width, height, channels=1):
    data = rng.integers(0, 256, size=(channels, height, width)).astype(np.float64)
    return RasterImage(data, Precision.CARRIER8)


def all_pairs_images(channels=1):
    """Cover/logo pair whose pixels enumerate every (f, g) in [0, 255]^2 once."""
    f, g = np.meshgrid(np.arange(256.0), np.arange(256.0), indexing="ij")
    cover = RasterImage(np.repeat(f[np.newaxis], channels, 0), Precision.CARRIER8)
    logo = RasterImage(g[np.newaxis], Precision.CARRIER8)
    return cover, logo


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance verdict line; printed in the terminal summary."""
    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
