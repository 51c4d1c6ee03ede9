import numpy as np
import pytest

from conicot import (
    SolverConfig,
    delta_sweep,
    gw_fragility_demo,
    make_kernel,
    robustness_probe,
    verify_bound_sandwich,
    verify_scaling,
    weak_iso_probe,
)
from conicot.analysis import SLACK_ABS, SLACK_REL, slack
from tests.conftest import random_network


def _cfg(name="exp", delta=0.5, seed=0):
    return SolverConfig(kernel=make_kernel(name, delta), restarts=4, seed=seed)


def test_slack_budget():
    assert slack(0.0) == SLACK_ABS
    assert slack(10.0) == pytest.approx(SLACK_REL * 10.0 + SLACK_ABS)
    assert slack(-10.0) == slack(10.0)


def test_verify_scaling_passes(rng):
    net = random_network(rng, 4, unit_mass=True)
    out = verify_scaling(net, r=2.0, s=1.0, config=_cfg())
    assert out["pass"], out
    names = [c["name"] for c in out["checks"]]
    assert names == ["scale_bound", "homogeneity", "combined_bound"]


def test_verify_scaling_zero_scale(rng):
    net = random_network(rng, 3, unit_mass=True)
    out = verify_scaling(net, r=0.0, s=1.0, config=_cfg("cos"))
    assert out["pass"], out


def test_verify_bound_sandwich_both_kernels(rng):
    nx = random_network(np.random.default_rng(1), 5, unit_mass=True)
    ny = random_network(np.random.default_rng(2), 5, unit_mass=True)
    for name in ("cos", "exp"):
        out = verify_bound_sandwich(nx, ny, _cfg(name))
        assert out["pass"], out
        assert out["uot_lower"] <= out["ccot"] + slack(out["upper"])
        assert out["cgw"] <= out["upper"] + slack(out["upper"])


def test_verify_bound_sandwich_rejects_unbalanced(rng):
    nx = random_network(rng, 4)
    ny = random_network(rng, 4)
    with pytest.raises(ValueError):
        verify_bound_sandwich(nx, ny, _cfg())


def test_robustness_probe(rng):
    net = random_network(rng, 5, unit_mass=True)
    out = robustness_probe(net, eps=0.05, trials=5, config=_cfg())
    assert out["violations"] == 0
    assert out["pass"]
    with pytest.raises(ValueError):
        robustness_probe(net, eps=1.5, trials=1, config=_cfg())


def test_robustness_probe_paired(rng):
    nx = random_network(np.random.default_rng(3), 4, unit_mass=True)
    ny = random_network(np.random.default_rng(4), 4, unit_mass=True)
    out = robustness_probe(nx, eps=0.05, trials=3, config=_cfg(), ny=ny)
    assert "paired" in out
    assert out["paired"]["pass"]


def test_gw_fragility_demo():
    out = gw_fragility_demo(eps=0.1, f_eps=1.0)
    assert out["pass"], out
    assert out["clean_gw2"] <= 1e-9
    assert abs(out["perturbed_gw2"] - 1.0) <= 1e-6
    with pytest.raises(ValueError):
        gw_fragility_demo(eps=0.0, f_eps=1.0)


def test_weak_iso_probe(rng):
    net = random_network(rng, 5, unit_mass=True)
    out = weak_iso_probe(net, _cfg())
    assert out["pass"], out
    assert [c["name"] for c in out["checks"]] == [
        "permutation", "split", "double_split"]


def test_delta_sweep_structure(rng):
    nx = random_network(np.random.default_rng(5), 4, unit_mass=True,
                        kernel_diameter=1.0)
    ny = random_network(np.random.default_rng(6), 4, unit_mass=True,
                        kernel_diameter=1.0)
    out = delta_sweep(nx, ny, [1.0, 4.0, 16.0], _cfg("exp", 1.0))
    assert len(out["rows"]) == 3
    gaps = [r["rel_gap"] for r in out["rows"]]
    assert out["final_gap_is_min"] == (gaps[-1] <= min(gaps) + 1e-12)
    assert out["fitted_constant"] > 0
    # unbalanced inputs are rejected
    with pytest.raises(ValueError):
        delta_sweep(random_network(rng, 3), ny, [1.0], _cfg())
