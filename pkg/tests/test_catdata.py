import dataclasses
import itertools

import numpy as np
import pytest

from gxcalc.catalog import CATALOG_NAMES, build_entry
from gxcalc.catdata import Bicharacter, deligne_product, make_tambara_yamagami, verify_unitarity
from gxcalc.consistency import check_pentagon
from gxcalc.errors import DegenerateBicharacter, MissingSymbol, UnknownName
from gxcalc.fusion import cyclic_group, quantum_dimensions, validate_ring


def _cyclic_bichar(n: int, alpha: complex, tau: complex) -> Bicharacter:
    grp = cyclic_group(n)
    vals = {(a, b): alpha ** (int(a) * int(b)) for a in grp.elements for b in grp.elements}
    return Bicharacter(group=grp, values=vals, tau=tau)


def test_ty_z3_values(ty):
    xi = np.exp(2j * np.pi / 3)
    assert abs(ty.f_symbol("omega", "X1", "omega", "X1", "X1", "X1") - xi) < 1e-12
    for a, b in itertools.product(("1", "omega", "omega*"), repeat=2):
        val = ty.f_symbol("X1", "X1", "X1", "X1", a, b)
        assert abs(abs(val) - 1 / np.sqrt(3)) < 1e-12


def test_ty_trivial_group_case():
    chi = _cyclic_bichar(1, 1.0, 1.0)
    cat = make_tambara_yamagami(chi, defect_label="m", name="ty_z1")
    assert cat.labels == ("0", "m")
    assert cat.channels("m", "m") == ["0"]
    assert abs(cat.f_symbol("m", "m", "m", "m", "0", "0") - 1.0) < 1e-12
    assert validate_ring(cat.ring) == []
    assert check_pentagon(cat).max_residual < 1e-12


@pytest.mark.parametrize(
    "n,alphas",
    [
        (2, [-1.0]),
        (3, [np.exp(2j * np.pi / 3), np.exp(-2j * np.pi / 3)]),
        (4, [1j, -1j]),
    ],
)
def test_ty_pentagon_all_nondegenerate_bicharacters(n, alphas):
    # exhaustive over the nondegenerate symmetric bicharacters of Z2, Z3, Z4
    for alpha in alphas:
        for tau_sign in (1.0, -1.0):
            chi = _cyclic_bichar(n, alpha, tau_sign / np.sqrt(n))
            cat = make_tambara_yamagami(chi)
            assert check_pentagon(cat).max_residual < 1e-12


def test_ty_rejects_degenerate_bicharacter():
    chi = _cyclic_bichar(2, 1.0, 1 / np.sqrt(2))  # chi identically 1 on Z2
    with pytest.raises(DegenerateBicharacter):
        make_tambara_yamagami(chi)


def test_deligne_product_dimensions(cats):
    bil = cats["bilayer_ising"]
    dims, total = quantum_dimensions(bil.ring)
    assert abs(dims["sigmasigma"] - 2.0) < 1e-9
    assert abs(total**2 - 16.0) < 1e-9


def test_deligne_smatrix_is_published_table(cats):
    # the full 9x9 bilayer S-matrix, rows/cols in the order
    # {11, 1s, 1p, s1, ss, sp, p1, ps, pp}
    r = np.sqrt(2)
    expected = (
        np.array(
            [
                [1, r, 1, r, 2, r, 1, r, 1],
                [r, 0, -r, 2, 0, -2, r, 0, -r],
                [1, -r, 1, r, -2, r, 1, -r, 1],
                [r, 2, r, 0, 0, 0, -r, -2, -r],
                [2, 0, -2, 0, 0, 0, -2, 0, 2],
                [r, -2, r, 0, 0, 0, -r, 2, -r],
                [1, r, 1, -r, -2, -r, 1, r, 1],
                [r, 0, -r, -2, 0, 2, r, 0, -r],
                [1, -r, 1, -r, 2, -r, 1, -r, 1],
            ]
        )
        / 4.0
    )
    paper_order = [
        "11", "1sigma", "1psi", "sigma1", "sigmasigma", "sigmapsi", "psi1", "psisigma", "psipsi",
    ]
    bil = cats["bilayer_ising"]
    ix = {lab: i for i, lab in enumerate(bil.ring.trivial_sector)}
    perm = [ix[lab] for lab in paper_order]
    s = bil.smatrix[np.ix_(perm, perm)]
    assert np.max(np.abs(s - expected)) < 1e-12
    # row sigma1 vanishes exactly on the sigma-column channels
    assert abs(s[3, 3]) < 1e-12 and abs(s[3, 4]) < 1e-12 and abs(s[3, 5]) < 1e-12


def test_deligne_with_unit_category(ising):
    unit_cat = dataclasses.replace(
        build_entry("ising1"),
        name="unit",
        ring=dataclasses.replace(
            ising.ring,
            labels=("1",),
            N={("1", "1", "1"): 1},
            dual={"1": "1"},
            grading={"1": "0"},
            action={"0": {"1": "1"}},
        ),
        F={},
        R={},
        twists={"1": 1.0},
        smatrix=np.array([[1.0]], dtype=complex),
    )
    prod = deligne_product(ising, unit_cat, namer=lambda a, b: a)
    assert prod.labels == ising.labels
    assert prod.ring.N == ising.ring.N
    for key, val in ising.F.items():
        assert abs(prod.F[key] - val) < 1e-12
    for key, val in ising.R.items():
        assert abs(prod.R[key] - val) < 1e-12


def test_bilayer_partial_fusion_table(bilayer_partial):
    assert set(bilayer_partial.channels("X1", "X1")) == {"11", "sigmasigma", "psipsi"}
    assert set(bilayer_partial.channels("X1", "sigmasigma")) == {"X1", "Xpsi"}
    assert bilayer_partial.n("Xsigma", "Xsigma", "sigmasigma") == 2
    assert bilayer_partial.partial


def test_catalog_twists(ising, ty):
    assert abs(ising.theta("sigma") - np.exp(1j * np.pi / 8)) < 1e-12
    assert abs(ising.theta("psi") + 1.0) < 1e-12
    xi = np.exp(2j * np.pi / 3)
    assert abs(ty.theta("omega") - xi) < 1e-12


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_verify_unitarity_catalogs(cats, name):
    assert verify_unitarity(cats[name]) == []


def test_verify_unitarity_detects_scaling(ising):
    bad_f = dict(ising.F)
    for key in bad_f:
        bad_f[key] = bad_f[key] * 1.01
    bad = dataclasses.replace(ising, F=bad_f, _dims=None, _total_dim=None)
    report = verify_unitarity(bad)
    assert any("not unitary" in line for line in report)


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_smatrix_unitary_first_row(cats, name):
    cat = cats[name]
    if cat.smatrix is None:
        return
    s = cat.smatrix
    dev = np.max(np.abs(s @ s.conj().T - np.eye(s.shape[0])))
    assert dev < 1e-9
    trivial = cat.ring.trivial_sector
    dims, _ = quantum_dimensions(cat.ring)
    d_trivial = np.sqrt(sum(dims[a] ** 2 for a in trivial))
    for j, a in enumerate(trivial):
        assert abs(s[0, j] - dims[a] / d_trivial) < 1e-9


def test_toric_character_ratios(cats):
    # oracle: toric code modular data is the square of the Z2 gauge theory;
    # the psi-row over the vacuum row must be a sign character
    tc = cats["toric_code"]
    labels = tc.ring.trivial_sector
    ix = {lab: i for i, lab in enumerate(labels)}
    s = tc.smatrix
    ratios = [s[ix["psi"], ix[c]] / s[ix["1"], ix[c]] for c in labels]
    assert all(abs(abs(r) - 1.0) < 1e-12 and abs(r.imag) < 1e-12 for r in ratios)
    assert sorted(round(r.real) for r in ratios) == [-1, -1, 1, 1]


def test_missing_symbol_and_unit_default(bilayer_partial, ising):
    with pytest.raises(MissingSymbol):
        bilayer_partial.f_symbol("Xsigma", "Xsigma", "Xsigma", "Xsigma", "11", "11")
    # unit legs default to 1 without explicit storage
    assert ising.f_symbol("1", "sigma", "sigma", "1", "sigma", "1") == 1.0
    assert ising.f_symbol("sigma", "sigma", "sigma", "psi", "1", "1") == 0.0  # inadmissible


def test_build_entry_unknown():
    with pytest.raises(UnknownName):
        build_entry("nope")
