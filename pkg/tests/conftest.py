import numpy as np
import pytest
from hypothesis import settings

from quartersample.imfile import to_gray

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def camera():
    from skimage import data

    return to_gray(data.camera())


@pytest.fixture(scope="session")
def natural_images():
    """The four 512x512 photographs shipped with scikit-image, in gray.

    The texture samples of the same size (brick, grass, gravel) are left out.
    """
    from skimage import data

    names = ["camera", "astronaut", "immunohistochemistry", "moon"]
    return [(name, to_gray(getattr(data, name)())) for name in names]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
