import numpy as np
import pytest

from conicot import validate_network, validate_hypernetwork


def random_network(rng, n, unit_mass=False, kernel_diameter=None):
    """Random metric-like network with uniform-ish weights."""
    pts = rng.normal(size=(n, 2))
    k = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
    if kernel_diameter is not None and k.max() > 0:
        k = k * (kernel_diameter / k.max())
    w = rng.uniform(0.5, 1.5, size=n)
    if unit_mass:
        w = w / w.sum()
    return validate_network(w, k, points=pts)


def random_hypernetwork(rng, n, m, unit_mass=False):
    k = rng.uniform(0.0, 1.0, size=(n, m))
    a = rng.uniform(0.5, 1.5, size=n)
    ap = rng.uniform(0.5, 1.5, size=m)
    if unit_mass:
        a = a / a.sum()
        ap = ap / ap.sum()
    return validate_hypernetwork(a, ap, k)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
