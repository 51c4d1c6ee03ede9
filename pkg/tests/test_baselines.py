import itertools

import numpy as np
import pytest

from conicot import (
    BaselineConfig,
    cot_solve,
    embed_network_as_hypernetwork,
    gw2_solve,
    ot_exact,
    sinkhorn,
    validate_network,
)
from conicot.baselines import _gw_objective, _gw_linear_term
from conicot.errors import CapExceeded, MassMismatch
from tests.conftest import random_hypernetwork, random_network


def _ot_bruteforce_uniform(cost):
    """Exact OT for uniform marginals via permanent-style enumeration."""
    n = cost.shape[0]
    best = np.inf
    for perm in itertools.permutations(range(n)):
        best = min(best, sum(cost[i, perm[i]] for i in range(n)) / n)
    return best


def test_ot_exact_matches_assignment_oracle(rng):
    # with uniform marginals the LP optimum matches the best permutation
    for trial in range(5):
        r = np.random.default_rng(trial)
        n = 5
        cost = r.uniform(size=(n, n))
        a = np.full(n, 1.0 / n)
        coupling, value = ot_exact(a, a, cost)
        assert coupling.feasible()
        assert value == pytest.approx(_ot_bruteforce_uniform(cost), abs=1e-10)


def test_ot_exact_one_dimensional_monotone():
    # sorted supports: the monotone (north-west) plan is optimal for |x-y|^2
    x = np.array([0.0, 1.0, 3.0])
    y = np.array([0.5, 1.5, 3.5])
    cost = (x[:, None] - y[None, :]) ** 2
    a = np.array([0.2, 0.5, 0.3])
    coupling, value = ot_exact(a, a, cost)
    expected = float((a * (x - y) ** 2).sum())
    assert value == pytest.approx(expected, abs=1e-12)


def test_ot_exact_errors():
    with pytest.raises(MassMismatch):
        ot_exact([1.0], [2.0], np.zeros((1, 1)))
    with pytest.raises(CapExceeded):
        ot_exact(np.ones(600) / 600, np.ones(600) / 600, np.zeros((600, 600)))


def test_sinkhorn_close_to_exact(rng):
    n = 6
    cost = rng.uniform(size=(n, n))
    a = rng.uniform(0.5, 1.5, size=n)
    a = a / a.sum()
    b = rng.uniform(0.5, 1.5, size=n)
    b = b / b.sum()
    _, exact = ot_exact(a, b, cost)
    coupling, value, _ = sinkhorn(a, b, cost, reg=1e-3, iters=5000)
    assert coupling.feasible(tol=1e-8)
    assert value >= exact - 1e-9
    assert value <= exact + 0.05 * max(exact, 1e-3)


def test_sinkhorn_rejects_bad_reg():
    with pytest.raises(ValueError):
        sinkhorn([1.0], [1.0], np.zeros((1, 1)), reg=0.0)


def test_gw_linear_term_matches_loop(rng):
    wx = rng.uniform(size=(3, 3))
    wy = rng.uniform(size=(4, 4))
    pi = rng.uniform(size=(3, 4))
    ref = np.zeros((3, 4))
    for i in range(3):
        for k in range(4):
            for ip in range(3):
                for kp in range(4):
                    ref[i, k] += (wx[i, ip] - wy[k, kp]) ** 2 * pi[ip, kp]
    assert np.allclose(_gw_linear_term(wx, wy, pi), ref, atol=1e-12)


def test_gw2_zero_on_permutation(rng):
    net = random_network(rng, 5, unit_mass=True)
    perm = rng.permutation(5)
    net_p = validate_network(net.weights[perm],
                             net.kernel[np.ix_(perm, perm)])
    pi = np.zeros((5, 5))
    pi[np.arange(5), np.argsort(perm)] = net.weights
    value, _ = gw2_solve(net, net_p, BaselineConfig(seed=1), extra_inits=[pi])
    assert value <= 1e-8


def test_gw2_two_point_closed_form():
    # 2-point spaces with equal weights: GW2 = |d1 - d2| / (2 sqrt(2))
    a = np.array([0.5, 0.5])
    nx = validate_network(a, np.array([[0.0, 1.0], [1.0, 0.0]]))
    ny = validate_network(a, np.array([[0.0, 3.0], [3.0, 0.0]]))
    value, coupling = gw2_solve(nx, ny)
    # objective at any coupling with these marginals: both the identity and
    # the anti-diagonal give (1-3)^2 * (1/2), off terms add (1+9)/4 each ...
    # brute force the 1-parameter coupling family instead
    best = np.inf
    for t in np.linspace(0, 0.5, 5001):
        pi = np.array([[t, 0.5 - t], [0.5 - t, t]])
        best = min(best, _gw_objective(nx.kernel, ny.kernel, pi))
    assert value == pytest.approx(0.5 * np.sqrt(best), abs=1e-6)


def test_gw2_monotone_trace_and_mass_check(rng):
    nx = random_network(rng, 5, unit_mass=True)
    ny = random_network(rng, 6)
    with pytest.raises(MassMismatch):
        gw2_solve(nx, ny)


def test_cot_matches_gw2_on_embedded_networks(rng):
    # embedding a network duplicates the axes; COT <= GW2 since couplings
    # (pi, pi) are feasible for COT
    nx = random_network(rng, 4, unit_mass=True)
    ny = random_network(rng, 4, unit_mass=True)
    g, pi = gw2_solve(nx, ny, BaselineConfig(restarts=6))
    value, cs, cf = cot_solve(embed_network_as_hypernetwork(nx),
                              embed_network_as_hypernetwork(ny))
    assert cs.feasible() and cf.feasible()
    assert value <= g + 1e-8 + 0.02 * g


def test_cot_zero_on_identical(rng):
    hx = random_hypernetwork(rng, 4, 3, unit_mass=True)
    value, _, _ = cot_solve(hx, hx)
    assert value <= 1e-8


def test_cot_mass_check(rng):
    hx = random_hypernetwork(rng, 4, 3, unit_mass=True)
    hy = random_hypernetwork(rng, 4, 3)
    with pytest.raises(MassMismatch):
        cot_solve(hx, hy)
