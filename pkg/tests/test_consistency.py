import dataclasses

import numpy as np
import pytest

from gxcalc.braids import build_rep
from gxcalc.consistency import (
    check_heptagon,
    check_hexagon,
    check_pentagon,
    heptagon_residual_fn,
    solve_defect_R,
)
from gxcalc.errors import MissingSymbol, NoConvergence
from gxcalc.numerics import fit_scalar

PENTAGON_SET = ("ising1", "z3", "toric_code", "ty_z3", "bilayer_ising")
HEXAGON_SET = ("ising1", "z3", "bilayer_ising")


@pytest.mark.parametrize("name", PENTAGON_SET + ("tc_z2x_restricted",))
def test_pentagon_catalogs(cats, name):
    rep = check_pentagon(cats[name])
    assert rep.max_residual < 1e-10
    assert rep.count_checked > 0


@pytest.mark.parametrize("name", HEXAGON_SET + ("toric_code",))
def test_hexagon_catalogs(cats, name):
    rep = check_hexagon(cats[name])
    assert rep.max_residual < 1e-10


def test_heptagon_ty_z3(ty):
    rep = check_heptagon(ty)
    assert rep.max_residual < 1e-10
    assert rep.count_checked > check_hexagon(ty).count_checked


def test_heptagon_reduces_to_hexagon(ising):
    # same code path: the trivial-sector restriction must agree to the bit
    hexa = check_hexagon(ising)
    hept = check_heptagon(ising, sectors=(ising.ring.group.identity,))
    assert hexa == hept


def test_pentagon_detects_injected_fault(ising):
    bad_f = dict(ising.F)
    bad_f[("sigma", "sigma", "sigma", "sigma", "1", "1")] *= -1
    bad = dataclasses.replace(ising, F=bad_f, _dims=None, _total_dim=None)
    assert check_pentagon(bad).max_residual > 0.1


def test_hexagon_detects_negated_r(ising):
    bad = ising.with_r_overrides({("sigma", "sigma", "psi"): -ising.R[("sigma", "sigma", "psi")]})
    assert check_hexagon(bad).max_residual > 0.1


def test_heptagon_detects_scaled_defect_r(ty):
    bad = ty.with_r_overrides({("X1", "X1", "omega"): 1j * ty.R[("X1", "X1", "omega")]})
    assert check_heptagon(bad).max_residual > 0.1


def test_pentagon_missing_symbol(bilayer_partial):
    with pytest.raises(MissingSymbol):
        check_pentagon(bilayer_partial)


def test_compiled_residual_matches_direct(ty):
    unknowns = [("X1", "X1", "1"), ("X1", "X1", "omega"), ("X1", "X1", "omega*")]
    fn = heptagon_residual_fn(ty, unknowns)
    vals = np.array([ty.R[k] for k in unknowns])
    direct = check_heptagon(ty).max_residual
    assert abs(fn(vals) - direct) < 1e-12
    tweaked = vals * np.array([1.0, 1j, 1.0])
    direct_tweaked = check_heptagon(ty, r_overrides=dict(zip(unknowns, tweaked))).max_residual
    assert abs(fn(tweaked) - direct_tweaked) < 1e-12


def test_grid_oracle_then_descent_ty(ty):
    """Exhaustive 24th-root grid confirms the optimum before trusting descent."""
    unknowns = [("X1", "X1", "1"), ("X1", "X1", "omega"), ("X1", "X1", "omega*")]
    fn = heptagon_residual_fn(ty, unknowns)
    grid = np.exp(2j * np.pi * np.arange(24) / 24)
    combos = np.array(np.meshgrid(grid, grid, grid)).reshape(3, -1)
    res = fn(combos)
    optima = combos[:, res < 1e-9]
    assert optima.shape[1] == 2  # the two signs of the global phase
    catalog_vals = np.array([ty.R[k] for k in unknowns])
    for k in range(optima.shape[1]):
        ratios = optima[:, k] / catalog_vals
        assert np.max(np.abs(ratios - ratios[0])) < 1e-9  # proportional to catalog
        assert abs(abs(ratios[0]) - 1.0) < 1e-9
    # xi-bar^{j^2} pattern up to one global phase
    xi = np.exp(2j * np.pi / 3)
    pattern = np.array([1.0, xi ** (-1), xi ** (-4)])
    for k in range(optima.shape[1]):
        scaled = optima[:, k] / optima[0, k]
        assert np.max(np.abs(scaled - pattern)) < 1e-9

    ansatz = solve_defect_R(ty, unknowns, seed=0)
    assert ansatz.residual < 1e-6
    found = np.array(ansatz.values)
    ratios = found / catalog_vals
    assert np.max(np.abs(ratios - ratios[0])) < 1e-6
    # the fitted ansatz reproduces the defect qutrit exchange matrix
    cat2 = ty.with_r_overrides(ansatz.as_overrides())
    rep = build_rep(cat2, "X1", 4, "1")
    mu = (-1 + 1j * np.sqrt(3)) / 2
    printed = np.array([[1, mu, mu], [mu, 1, mu], [mu, mu, 1]], dtype=complex)
    c = fit_scalar(rep.generators[1], printed)
    assert np.max(np.abs(rep.generators[1] - c * printed)) < 1e-9


def test_solver_all_phases_unit_and_reproducible(ty):
    unknowns = [("X1", "X1", "1"), ("X1", "X1", "omega"), ("X1", "X1", "omega*")]
    ansatz = solve_defect_R(ty, unknowns, seed=3)
    assert all(abs(abs(v) - 1.0) < 1e-12 for v in ansatz.values)
    fn = heptagon_residual_fn(ty, unknowns)
    assert abs(fn(np.array(ansatz.values)) - ansatz.residual) < 1e-12


def test_solver_recovers_ising_r(ising):
    unknowns = [("sigma", "sigma", "1"), ("sigma", "sigma", "psi")]
    ansatz = solve_defect_R(ising, unknowns, seed=1)
    r1, rp = ansatz.values
    assert abs(abs(rp / r1) - 1.0) < 1e-9
    assert min(abs(rp / r1 - 1j), abs(rp / r1 + 1j)) < 1e-6
    # grid oracle over 16th roots agrees
    fn = heptagon_residual_fn(ising, unknowns)
    g16 = np.exp(2j * np.pi * np.arange(16) / 16)
    combos = np.array(np.meshgrid(g16, g16)).reshape(2, -1)
    res = fn(combos)
    optima = combos[:, res < 1e-9]
    assert optima.shape[1] > 0
    assert all(min(abs(q - 1j), abs(q + 1j)) < 1e-9 for q in optima[1] / optima[0])


def test_solver_no_convergence_on_broken_f(ising):
    bad_f = dict(ising.F)
    bad_f[("sigma", "sigma", "sigma", "sigma", "1", "1")] *= -1
    bad = dataclasses.replace(ising, F=bad_f, _dims=None, _total_dim=None)
    with pytest.raises(NoConvergence):
        solve_defect_R(bad, [("sigma", "sigma", "1"), ("sigma", "sigma", "psi")], seed=0, max_iter=300)


def test_solver_deterministic(ty):
    unknowns = [("X1", "X1", "1"), ("X1", "X1", "omega"), ("X1", "X1", "omega*")]
    a = solve_defect_R(ty, unknowns, seed=11)
    b = solve_defect_R(ty, unknowns, seed=11)
    assert a.values == b.values and a.residual == b.residual
