import numpy as np
import pytest

from gxcalc.braids import (
    BraidRep,
    build_rep,
    check_braid_relations,
    density_probe,
    projective_closure,
    projective_distance,
)
from gxcalc.errors import NotFixedPoint
from gxcalc.fusion import FusionRing, cyclic_group
from gxcalc.catdata import SkeletalCategory
from gxcalc.trees import enumerate_basis

PREF = np.exp(-1j * np.pi / 8)
QUBIT_S1 = PREF * np.diag([1.0, 1j])
QUBIT_S2 = (PREF / 2) * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])


def test_defect_qubit_gates(cats):
    rep = build_rep(cats["tc_z2x_restricted"], "sigma+", 4, "1")
    g1, g2, g3 = rep.generators
    assert np.max(np.abs(g1 - QUBIT_S1)) < 1e-12
    assert np.max(np.abs(g3 - QUBIT_S1)) < 1e-12
    assert np.max(np.abs(g2 - QUBIT_S2)) < 1e-12


def test_defect_qubit_equals_ising_qubit(cats):
    rep_tc = build_rep(cats["tc_z2x_restricted"], "sigma+", 4, "1")
    rep_is = build_rep(cats["ising1"], "sigma", 4, "1")
    for a, b in zip(rep_tc.generators, rep_is.generators):
        assert np.max(np.abs(a - b)) < 1e-12  # equal with phase 1, not merely projective


def test_two_strand_rep(ty):
    rep = build_rep(ty, "X1", 2, "omega")
    (g,) = rep.generators
    assert g.shape == (1, 1)
    assert abs(g[0, 0] - ty.R[("X1", "X1", "omega")]) < 1e-12


def test_qutrit_gates(ty):
    rep = build_rep(ty, "X1", 4, "1")
    g1, g2, g3 = rep.generators
    diag_expected = np.array([ty.R[("X1", "X1", c)] for c in ("1", "omega", "omega*")])
    assert np.max(np.abs(g1 - np.diag(diag_expected))) < 1e-12
    assert np.max(np.abs(g3 - g1)) < 1e-12
    mu = (-1 + 1j * np.sqrt(3)) / 2
    printed = np.array([[1, mu, mu], [mu, 1, mu], [mu, mu, 1]], dtype=complex)
    num = np.vdot(printed, g2)
    c = num / np.vdot(printed, printed)
    assert np.max(np.abs(g2 - c * printed)) < 1e-9
    assert abs(abs(c) - 1 / (3 * np.sqrt(3)) * 3) < 1e-9  # |c| = 1/sqrt(3)


@pytest.mark.parametrize(
    "name,obj,total",
    [
        ("tc_z2x_restricted", "sigma+", "1"),
        ("ising1", "sigma", "1"),
        ("ty_z3", "X1", "1"),
        ("bilayer_ising", "sigmasigma", "11"),
    ],
)
def test_generators_unitary_and_relations(cats, name, obj, total):
    rep = build_rep(cats[name], obj, 4, total)
    for g in rep.generators:
        dev = np.max(np.abs(g @ g.conj().T - np.eye(rep.dimension)))
        assert dev < 1e-9
    assert check_braid_relations(rep) < 1e-9


def test_far_commutation_exact(cats):
    rep = build_rep(cats["tc_z2x_restricted"], "sigma+", 4, "1")
    g1, _, g3 = rep.generators
    assert np.max(np.abs(g1 @ g3 - g3 @ g1)) == 0.0  # both diagonal


def test_perturbed_generator_fails_relations(cats):
    rep = build_rep(cats["tc_z2x_restricted"], "sigma+", 4, "1")
    gens = list(rep.generators)
    gens[0] = gens[0] @ np.diag([1.0, np.exp(0.1j)])
    bad = BraidRep(n=rep.n, basis=rep.basis, generators=tuple(gens))
    assert check_braid_relations(bad) > 1e-3


def test_qubit_closure_order_24(cats):
    rep = build_rep(cats["tc_z2x_restricted"], "sigma+", 4, "1")
    res = projective_closure(rep, bound=100_000)
    assert res.order == 24


def test_qutrit_closure_finite(ty):
    rep = build_rep(ty, "X1", 4, "1")
    res = projective_closure(rep, bound=100_000)
    assert isinstance(res.order, int)
    assert res.order < 10_000


def test_closure_identity_rep():
    res = projective_closure([np.eye(3, dtype=complex)], bound=10)
    assert res.order == 1


def test_closure_invariant_under_global_phase(cats):
    rep = build_rep(cats["tc_z2x_restricted"], "sigma+", 4, "1")
    rephased = [np.exp(0.37j) * g for g in rep.generators]
    assert projective_closure(rephased, bound=100_000).order == 24


def test_density_probe_verdicts(cats):
    rep = build_rep(cats["tc_z2x_restricted"], "sigma+", 4, "1")
    verdict = density_probe(rep, steps=10_000)
    assert verdict.kind == "closure_found" and verdict.order == 24

    phi = (np.sqrt(5) - 1) / 2
    gen = np.diag([1.0, np.exp(2j * np.pi * phi)])
    basis = enumerate_basis(cats["ising1"], ("sigma",) * 2, "1")
    irrational = BraidRep(n=2, basis=basis, generators=(gen,))
    verdict = density_probe(irrational, steps=2_000)
    assert verdict.kind == "no_closure_within"
    assert "not a proof of density" in verdict.note


def test_projective_distance():
    a = np.diag([1.0, 1j])
    assert projective_distance(a, np.exp(1.1j) * a) < 1e-12
    assert projective_distance(a, np.diag([1.0, -1j])) > 0.5


def _swapped_defect_mock() -> SkeletalCategory:
    """Z2-graded ring whose two defects are exchanged by the flux action."""
    labels = ("1", "z", "X", "Y")
    N = {}
    table = {
        ("1", "1"): "1", ("1", "z"): "z", ("1", "X"): "X", ("1", "Y"): "Y",
        ("z", "1"): "z", ("z", "z"): "1", ("z", "X"): "Y", ("z", "Y"): "X",
        ("X", "1"): "X", ("X", "z"): "Y", ("X", "X"): "1", ("X", "Y"): "z",
        ("Y", "1"): "Y", ("Y", "z"): "X", ("Y", "X"): "z", ("Y", "Y"): "1",
    }
    for (a, b), c in table.items():
        N[(a, b, c)] = 1
    ring = FusionRing(
        labels=labels,
        N=N,
        unit="1",
        dual={"1": "1", "z": "z", "X": "X", "Y": "Y"},
        group=cyclic_group(2),
        grading={"1": "0", "z": "0", "X": "1", "Y": "1"},
        action={
            "0": {a: a for a in labels},
            "1": {"1": "1", "z": "z", "X": "Y", "Y": "X"},
        },
    )
    return SkeletalCategory(name="swapmock", ring=ring, twists={a: 1.0 for a in labels})


def test_not_fixed_point(cats):
    mock = _swapped_defect_mock()
    with pytest.raises(NotFixedPoint):
        build_rep(mock, "X", 4, "1")
