import os
import sys
from pathlib import Path
from typing import List

import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from pconcave_app.convex_geom import ConvexBody, square  # noqa: E402
from pconcave_app.pde_solve import OperatorSpec, SolveParams, solve  # noqa: E402


@pytest.fixture(autouse=True)
def restore_env():
    before = os.environ.copy()
    yield
    os.environ.clear()
    os.environ.update(before)


@pytest.fixture(scope="session")
def torsion():
    return OperatorSpec()


@pytest.fixture(scope="session")
def square_torsion(torsion):
    """Torsion solution on [-1, 1]^2 at h = 1/8."""
    return solve(square(1.0), torsion, SolveParams(h=1.0 / 8.0))


@pytest.fixture(scope="session")
def disc_torsion(torsion):
    """Torsion solution on the unit disc at h = 1/8."""
    return solve(ConvexBody.disc((0.0, 0.0), 1.0), torsion, SolveParams(h=1.0 / 8.0))


@pytest.fixture(scope="session")
def fine_disc_torsion(torsion):
    return solve(ConvexBody.disc((0.0, 0.0), 1.0), torsion, SolveParams(h=1.0 / 16.0))


class DummyWriteAPI:
    def __init__(self, error: Exception = None):
        self.calls: List[tuple] = []
        self.error = error

    def write(self, bucket, org, record):
        if self.error is not None:
            raise self.error
        self.calls.append((bucket, org, record))


class DummyClient:
    def __init__(self, error: Exception = None):
        self.api = DummyWriteAPI(error)

    def write_api(self, write_options=None):
        return self.api


@pytest.fixture
def dummy_client():
    return DummyClient()


@pytest.fixture
def make_client():
    return DummyClient
