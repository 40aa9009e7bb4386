import numpy as np
import pytest

from solitoncomm import zs
from solitoncomm.waveform import make_grid, soliton_waveform


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger numba JIT once so per-test runtime assertions measure the
    compiled kernels, not compilation."""
    g = make_grid(256, 20.0)
    w = soliton_waveform(g, 1.0)
    zs.scattering_coefficients(w, 0.3 + 0.2j)
    zs.norming_constants(w, [z for z in zs.find_discrete_eigenvalues(w, seeds=[0.5j])])
    zs.reflection_coefficient(w, np.linspace(-1, 1, 4))
