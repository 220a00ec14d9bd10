import dataclasses

import numpy as np
import pytest

from gxcalc.braids import build_rep
from gxcalc.errors import MissingSymbol, UnsupportedConfiguration
from gxcalc.protocols import (
    PROTOCOL_LEAVES,
    run_protocol,
    tgate_closed_form,
    tgate_core_script,
    tgate_diagrammatic,
    tgate_protocol_script,
)

T_PHASE = np.exp(1j * np.pi / 4)
HEADER = "strands 8 : " + " ".join(PROTOCOL_LEAVES) + "\n"


def test_closed_form_per_channel_terms(bilayer_partial):
    """Frozen hand evaluation of the printed formulas with the A.1/A.2 data.

    For <1|T|1> / (d_s1 d_X^2): channel 11 gives (1)^2*(1/2)^2*(sqrt2)^2 = 1/2,
    sigmasigma gives 0 (its anyon loop factor vanishes), psipsi gives 1/2.
    For <psi|T|psi>: only sigmasigma survives, theta_sigma^2 * 1/2 * 2.
    """
    cat = bilayer_partial
    six = {lab: i for i, lab in enumerate(cat.ring.trivial_sector)}
    s = cat.smatrix
    terms11 = {}
    termspp = {}
    for c in ("11", "sigmasigma", "psipsi"):
        w = cat.r_symbol("X1", "X1", c) ** 2 * abs(cat.f_symbol("X1", "X1", "X1", "X1", c, "11")) ** 2
        terms11[c] = w * (s[six["sigma1"], six[c]] / s[six["11"], six[c]]) ** 2
        termspp[c] = w * (1 - s[six["psi1"], six[c]] / s[six["11"], six[c]])
    assert abs(terms11["11"] - 0.5) < 1e-12
    assert abs(terms11["sigmasigma"]) < 1e-12
    assert abs(terms11["psipsi"] - 0.5) < 1e-12
    assert abs(termspp["11"]) < 1e-12
    assert abs(termspp["sigmasigma"] - T_PHASE) < 1e-12
    assert abs(termspp["psipsi"]) < 1e-12

    res = tgate_closed_form(cat)
    norm = cat.d("sigma1") * cat.d("X1") ** 2
    assert abs(res.t11 - norm * 1.0) < 1e-9
    assert abs(res.tpsipsi - norm * T_PHASE) < 1e-9
    assert abs(res.ratio - T_PHASE) < 1e-12
    assert res.offdiag_max == 0.0


def test_diagrammatic_matches_closed_form(bilayer_partial):
    closed = tgate_closed_form(bilayer_partial)
    diag = tgate_diagrammatic(bilayer_partial)
    assert abs(diag.ratio - T_PHASE) < 1e-9
    assert diag.offdiag_max < 1e-12
    # entrywise agreement after dividing both by their <1|T|1>
    assert abs(diag.t11 / diag.t11 - closed.t11 / closed.t11) < 1e-9
    assert abs(diag.tpsipsi / diag.t11 - closed.tpsipsi / closed.t11) < 1e-9


def test_diagrammatic_consumes_no_nontrivial_symmetry_factors(bilayer_partial):
    diag = tgate_diagrammatic(bilayer_partial)
    assert diag.consumed is not None
    # the evaluator crossed defect strands, so it consulted the U/eta tables,
    # and with the catalog convention every consulted factor is 1
    assert diag.consumed["U"] >= 1 and diag.consumed["eta"] >= 1
    assert bilayer_partial.trivial_symmetry_factors


def test_diagrammatic_requires_trivial_u_eta(bilayer_partial):
    cat = dataclasses.replace(
        bilayer_partial,
        U={("1", "11", "11", "11"): -1.0},
        _dims=bilayer_partial._dims,
        _total_dim=bilayer_partial._total_dim,
    )
    with pytest.raises(UnsupportedConfiguration):
        tgate_diagrammatic(cat)


def test_closed_form_missing_conjecture_data(bilayer_partial):
    stripped = dataclasses.replace(
        bilayer_partial,
        R={k: v for k, v in bilayer_partial.R.items() if k[0] != "X1"},
        _dims=bilayer_partial._dims,
        _total_dim=bilayer_partial._total_dim,
    )
    with pytest.raises(MissingSymbol):
        tgate_closed_form(stripped)


def test_run_protocol_t_gate(bilayer_partial):
    run = run_protocol(bilayer_partial)
    want = np.diag([1.0, T_PHASE])
    assert np.max(np.abs(run.normalized_block - want)) < 1e-9
    assert run.leakage < 1e-9
    assert abs(run.ratio - T_PHASE) < 1e-9


def test_run_protocol_empty_script(bilayer_partial):
    run = run_protocol(bilayer_partial, HEADER)
    assert np.max(np.abs(run.block - np.eye(2))) < 1e-12
    assert run.leakage < 1e-12


def test_run_protocol_step5_matches_defect_exchange(bilayer_partial):
    """Full exchange of the middle defects alone: squared-R channel phases.

    On the y-index the operator must equal the defect subsystem's sigma_2^2
    from the braid representation, tensored with the untouched anyon label.
    """
    run = run_protocol(bilayer_partial, HEADER + "braid+ 6\nbraid+ 6\n")
    rep = build_rep(bilayer_partial, "X1", 4, "11")
    s2sq = rep.generators[1] @ rep.generators[1]
    assert np.max(np.abs(run.block - np.diag([s2sq[0, 0], s2sq[0, 0]]))) < 1e-9
    # and the squared-R pattern explicitly: sum_c |F_{c,11}|^2 R_c^2
    expect = sum(
        abs(bilayer_partial.f_symbol("X1", "X1", "X1", "X1", c, "11")) ** 2
        * bilayer_partial.r_symbol("X1", "X1", c) ** 2
        for c in ("11", "sigmasigma", "psipsi")
    )
    assert abs(s2sq[0, 0] - expect) < 1e-12


def test_ratio_invariant_under_common_r_phase(bilayer_partial):
    for gamma in (-1.0, np.exp(0.3j)):
        overrides = {
            ("X1", "X1", c): gamma * bilayer_partial.R[("X1", "X1", c)]
            for c in ("11", "sigmasigma", "psipsi")
        }
        cat = bilayer_partial.with_r_overrides(overrides)
        res = tgate_closed_form(cat)
        assert abs(res.ratio - T_PHASE) < 1e-9
        run = run_protocol(cat)
        assert abs(run.ratio - T_PHASE) < 1e-9


def test_protocol_scripts_ship(bilayer_partial):
    assert "lasso+ 4 6 7" in tgate_core_script()
    assert "project 7 X1 X1 11" in tgate_protocol_script()
    with pytest.raises(UnsupportedConfiguration):
        run_protocol(bilayer_partial, "strands 2 : X1 X1\nbraid+ 1\n")
