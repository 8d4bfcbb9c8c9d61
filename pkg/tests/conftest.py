import numpy as np
import pytest

import dynvlasov as dv


@pytest.fixture
def landau_cfg():
    """Coarse configuration of the stochastic linear test problem:
    E = cos(2 pi x), sigma = 0.5 sin(2 pi x), Gaussian-profile initial data."""
    return dv.SimulationConfig(
        case="I", L=1.0, T=1.0, N=16, dx=1 / 64, dv=1 / 64, U0=6.0,
        epsilon0=dv.initial_density_landau(0.0, 6.0, 0.05, 1.0),
        integrator=dv.IntegratorKind.SSM,
        sigma=dv.SigmaSpec(kinds=("sine",), amplitudes=(0.5,)),
        initial=dv.InitialSpec(kind="landau", alpha=0.05),
        field=dv.FieldSpec(kind="cosine", amplitude=1.0),
        seed=12345)


@pytest.fixture
def smooth_field_eval():
    """E = cos(2 pi x), sigma_1 = sin(2 pi x) on L = 1, with derivatives."""
    model = dv.CaseOneField(kind="cosine", amplitude=1.0, L=1.0)
    sigma = dv.SigmaModel(components=(
        dv.SigmaComponent(kind="sine", amplitude=1.0, L=1.0),))
    return dv.make_field_eval(model, sigma)


def gaussian_field(nx=32, nv=65, L=1.0, U=2.0):
    grid = dv.make_grid(L, L / nx, 2 * U / (nv - 1), U)
    return dv.sample_on_grid(
        lambda x, v: np.exp(-0.5 * v ** 2) * (1 + 0.25 * np.sin(2 * np.pi * x / L)),
        grid)
