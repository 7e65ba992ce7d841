import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from config.settings import Tolerances, tolerance_manager  # noqa: E402
from scenarios.library import (  # noqa: E402
    wedge_domain, parabola_domain, unit_disk_domain, half_plane_domain, half_line_domain, moving_wall_domain,
)


@pytest.fixture(autouse=True)
def isolated_tolerances(monkeypatch):
    """Cada teste parte das tolerâncias padrão, sem variáveis PDS_* do ambiente"""
    for name in ('PDS_TAU_FEAS', 'PDS_TAU_ACT', 'PDS_RANK_RTOL', 'PDS_KKT_TOL',
                 'PDS_MAX_ITER', 'PDS_SEED', 'PDS_THREADS'):
        monkeypatch.delenv(name, raising=False)
    tolerance_manager.reset()
    tolerance_manager.initialize(use_env=False)
    yield
    tolerance_manager.reset()


@pytest.fixture
def tolerances():
    return Tolerances()


@pytest.fixture
def wedge():
    return wedge_domain()


@pytest.fixture
def parabola():
    return parabola_domain()


@pytest.fixture
def disk():
    return unit_disk_domain()


@pytest.fixture
def half_plane():
    return half_plane_domain()


@pytest.fixture
def half_line():
    return half_line_domain()


@pytest.fixture
def moving_wall():
    return moving_wall_domain()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
