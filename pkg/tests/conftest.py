import pytest

from nanotouch import _kernels, experiments


@pytest.fixture(scope="session", autouse=True)
def jit_warmup():
    """Compile (or load from cache) the jitted kernels once per session."""
    _kernels.warmup()


@pytest.fixture(scope="session")
def snap_curve():
    """The default soft-spring sweep: one snap-in, one snap-off."""
    cfg = experiments.default_sweep_config(stiffness=0.1)
    return experiments.quasi_static_sweep(cfg), cfg


@pytest.fixture(scope="session")
def stiff_curve():
    """The stiff-spring sweep over the same range: no events."""
    cfg = experiments.default_sweep_config(stiffness=10.0)
    return experiments.quasi_static_sweep(cfg), cfg
