import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from visitreg.core import Period, SegmentedDataset  # noqa: E402
from visitreg.synthgen import LevelSpec, ProcessSpec, SynthConfig  # noqa: E402


def stationary_level(mean, slope, noise_frac=0.05, phi=0.3, noise_phi=0.0, intercept=0.0):
    return LevelSpec(
        ProcessSpec("ar1", mean=mean, phi=phi, sd=0.25 * mean),
        slope=slope,
        intercept=intercept,
        noise_sd=noise_frac * slope * mean,
        noise_phi=noise_phi,
    )


def type_config(seed=0, periods=240, noise_frac=0.05):
    return SynthConfig(seed, periods, {
        "type": {
            "new": stationary_level(400, 2.40, noise_frac),
            "returning": stationary_level(300, 5.22, noise_frac),
        }
    })


@pytest.fixture
def small_dataset():
    periods = [Period(2009, 1), Period(2009, 2), Period(2009, 3)]
    return SegmentedDataset.from_counts(periods, {
        "source": {
            "search": ([10, 12, 11], [30, 40, 33]),
            "direct": ([5, 4, 6], [20, 18, 25]),
        },
        "type": {
            "new": ([9, 10, 12], [28, 30, 35]),
            "returning": ([6, 6, 5], [22, 28, 23]),
        },
    })


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
