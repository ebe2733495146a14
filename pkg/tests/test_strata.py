import json
from importlib import resources

import pytest

from planesheaves.presentation import Presentation, dual, hilbert, profile, twist
from planesheaves.strata import (REGISTRY, ClassifyError, MODULI_DIM,
                                 StrataError, apply_recipe,
                                 classify, dim_audit, generate,
                                 generic_stabilizer_dim, get_row,
                                 normalize_chi, rows_for_chi, side_condition,
                                 verify_row)

SEXTIC = "X^6 + Y^6 + Z^6 + X*Y*Z^4 + 2*X^2*Y^2*Z^2"

EXPECTED_ROWS = {
    # chi -> {id: (codim, source, target, conditions)}
    1: {
        "X_0": (0, (-2,) * 5, (-1, -1, -1, -1, 0), {"h0_Fm1": 0, "h1_F": 0, "h0_omega": 0}),
        "X_1": (2, (-3, -2, -2), (-1, 0, 0), {"h0_Fm1": 0, "h1_F": 1, "h0_omega": 0}),
        "X_2": (4, (-3, -2, -2, -1), (-1, -1, 0, 0), {"h0_Fm1": 0, "h1_F": 1, "h0_omega": 1}),
        "X_3": (6, (-3, -3, -1, -1), (-2, 0, 0, 0), {"h0_Fm1": 0, "h1_F": 2, "h0_omega": 2}),
        "X_4": (6, (-3, -3), (-1, 1), {"h0_Fm1": 1, "h1_F": 2, "h0_omega": 3}),
        "X_5": (8, (-4, -1), (0, 1), {"h0_Fm1": 1, "h1_F": 3, "h0_omega": 4}),
    },
    2: {
        "X_0": (0, (-2,) * 4, (-1, -1, 0, 0), {"h0_Fm1": 0, "h1_F": 0, "h0_omega": 0}),
        "X_1": (3, (-2, -2, -2, -2, -1), (-1, -1, -1, 0, 0), {"h0_Fm1": 0, "h1_F": 0, "h0_omega": 1}),
        "X_2": (3, (-3, -2, -1), (0, 0, 0), {"h0_Fm1": 0, "h1_F": 1, "h0_omega": 1}),
        "X_3": (5, (-3, -2, -1, -1), (-1, 0, 0, 0), {"h0_Fm1": 0, "h1_F": 1, "h0_omega": 2}),
        "X_4": (5, (-3, -2, -2), (-1, -1, 1), {"h0_Fm1": 1, "h1_F": 1, "h0_omega": 3}),
        "X_5": (7, (-3, -3, -1), (-2, 0, 1), {"h0_Fm1": 1, "h1_F": 2, "h0_omega": 4}),
        "X_6": (9, (-4, 0), (1, 1), {"h0_Fm1": 2, "h1_F": 3, "h0_omega": 6}),
    },
    3: {
        "X_0": (0, (-2,) * 3, (0,) * 3, {"h0_Fm1": 0, "h1_F": 0, "h0_omega": 0}),
        "X_1": (1, (-2, -2, -2, -1), (-1, 0, 0, 0), {"h0_Fm1": 0, "h1_F": 0, "h0_omega": 1}),
        "X_2": (4, (-2, -2, -2, -1, -1), (-1, -1, 0, 0, 0), {"h0_Fm1": 0, "h1_F": 0, "h0_omega": 2}),
        "X_3": (4, (-3, -1, -1, -1), (0,) * 4, {"h0_Fm1": 0, "h1_F": 1, "h0_omega": 3}),
        "X_3D": (4, (-2,) * 4, (-1, -1, -1, 1), {"h0_Fm1": 1, "h1_F": 0, "h0_omega": 3}),
        "X_4": (5, (-3, -2), (0, 1), {"h0_Fm1": 1, "h1_F": 1, "h0_omega": 3}),
        "X_5": (6, (-3, -2, -1), (-1, 0, 1), {"h0_Fm1": 1, "h1_F": 1, "h0_omega": 4}),
        "X_6": (8, (-3, -3, 0), (-2, 1, 1), {"h0_Fm1": 2, "h1_F": 2, "h0_omega": 6}),
        "X_7": (10, (-4,), (2,), {"h0_Fm1": 3, "h1_F": 3, "h0_omega": 8}),
    },
    0: {
        "X_0": (0, (-2,) * 6, (-1,) * 6, {"h0_Fm1": 0, "h1_F": 0, "h1_F1": 0}),
        "X_1": (1, (-3, -2, -2, -2), (-1, -1, -1, 0), {"h0_Fm1": 0, "h1_F": 1, "h1_F1": 0}),
        "X_2": (4, (-3, -3), (0, 0), {"h0_Fm1": 0, "h1_F": 2, "h1_F1": 0}),
        "X_3": (7, (-4, -1, -1), (0, 0, 0), {"h0_Fm1": 0, "h1_F": 3, "h1_F1": 1}),
        "X_3D": (7, (-3, -3, -3), (-2, -2, 1), {"h0_Fm1": 1, "h1_F": 3, "h1_F1": 0}),
        "X_4": (8, (-4, -2), (-1, 1), {"h0_Fm1": 1, "h1_F": 3, "h1_F1": 1}),
    },
}


# -- registry ----------------------------------------------------------------

def test_registry_counts():
    assert len(REGISTRY) == 28
    assert {chi: len(rows_for_chi(chi)) for chi in (1, 2, 3, 0)} == {1: 6, 2: 7, 3: 9, 0: 6}


def test_registry_matches_hardcoded_expectations():
    for chi, expected in EXPECTED_ROWS.items():
        rows = {r.id: r for r in rows_for_chi(chi)}
        assert set(rows) == set(expected)
        for sid, (codim, source, target, conditions) in expected.items():
            row = rows[sid]
            assert row.codim == codim
            assert row.source == source
            assert row.target == target
            assert row.conditions == conditions


def test_registry_condition_vectors_pairwise_distinct():
    for chi in (0, 1, 2, 3):
        seen = set()
        for row in rows_for_chi(chi):
            key = tuple(sorted(row.conditions.items()))
            assert key not in seen
            seen.add(key)


def test_registry_file_is_what_we_loaded():
    with resources.files("planesheaves.data").joinpath("strata_registry.json").open() as fh:
        raw = json.load(fh)
    assert raw["moduli_dimension"] == MODULI_DIM == 37
    assert len(raw["rows"]) == 28


def test_quotient_kinds():
    assert get_row(2, "X_0").quotient_kind == "good"
    assert get_row(3, "X_1").quotient_kind == "categorical"
    assert get_row(3, "X_3").quotient_kind == "mixed"
    assert get_row(0, "X_1").quotient_kind == "categorical"
    assert get_row(1, "X_5").quotient_kind == "geometric"
    assert get_row(1, "X_4").stability_asserted


# -- normalize_chi -------------------------------------------------------------

def test_normalize_examples():
    assert normalize_chi(6, 7) == (1, [{"op": "twist", "k": -1}])
    assert normalize_chi(6, 5) == (1, [{"op": "dualize"}, {"op": "twist", "k": 1}])
    assert normalize_chi(6, -2) == (2, [{"op": "dualize"}])
    assert normalize_chi(6, 2) == (2, [])
    with pytest.raises(StrataError):
        normalize_chi(5, 1)


def test_recipe_application():
    P = Presentation.from_text([-4], [2], [[SEXTIC]])
    shifted = twist(P, 1)       # chi = 9
    chi_bar, recipe = normalize_chi(6, hilbert(shifted).chi)
    assert chi_bar == 3
    Q = apply_recipe(shifted, recipe)
    assert hilbert(Q).chi == 3


# -- classify -------------------------------------------------------------------

def test_classify_oc2():
    P = Presentation.from_text([-4], [2], [[SEXTIC]])
    label = classify(P)
    assert (label.chi, label.id, label.codim) == (3, "X_7", 10)


def test_classify_chi0_x4():
    P = generate(0, "X_4", seed=1)
    label = classify(P)
    assert (label.chi, label.id, label.codim) == (0, "X_4", 8)


def test_classify_chi0_open():
    P = generate(0, "X_0", seed=1)
    assert classify(P).id == "X_0"


def test_classify_normalizes_twists():
    P = twist(Presentation.from_text([-4], [2], [[SEXTIC]]), 2)   # chi = 15
    label = classify(P)
    assert (label.chi, label.id) == (3, "X_7")


def test_classify_profile_not_in_table():
    # a wildly unbalanced direct sum of line sheaves: multiplicity 6 but a
    # cohomology vector no semistable sheaf realizes
    lines = ["X", "Y", "Z", "X + Y", "Y + Z", "X + Z"]
    ks = [-3, -3, -3, 0, 0, 0]
    rows = [[lines[i] if i == j else "0" for j in range(6)] for i in range(6)]
    P = Presentation.from_text([k - 1 for k in ks], ks, rows)
    assert hilbert(P).r == 6
    with pytest.raises(ClassifyError):
        classify(P)


# -- side conditions -------------------------------------------------------------

def test_side_condition_pass_and_fail():
    P = generate(3, "X_5", seed=2)
    row = get_row(3, "X_5")
    assert side_condition(P, row).status == "pass"

    # dependent pencil entries in the chi=1 X_3 shape
    bad = Presentation.from_text(
        [-3, -3, -1, -1], [-2, 0, 0, 0],
        [["X", "X", "0", "0"],
         ["X^3", "Y^3", "X", "Y"],
         ["Y^3", "Z^3", "Y", "Z"],
         ["Z^3", "X^3", "Z", "X"]])
    assert side_condition(bad, get_row(1, "X_3")).status == "fail"


def test_side_condition_unknown_for_orbit_rows():
    P = generate(2, "X_0", seed=3)
    res = side_condition(P, get_row(2, "X_0"))
    assert res.status == "unknown"
    assert "orbit" in res.reason


def test_side_condition_shape_mismatch_errors():
    P = generate(1, "X_0", seed=1)
    with pytest.raises(StrataError):
        side_condition(P, get_row(3, "X_7"))


# -- generate ---------------------------------------------------------------------

@pytest.mark.parametrize("chi,sid", [(1, "X_0"), (3, "X_3D"), (2, "X_6")])
def test_generate_round_trip(chi, sid):
    P = generate(chi, sid, seed=11)
    label = classify(P)
    assert (label.chi, label.id) == (chi, sid)
    hd = hilbert(P)
    assert (hd.r, hd.chi) == (6, chi)


def test_generate_expected_profiles():
    assert profile(generate(1, "X_0", seed=5)).as_tuple()[:3] == (0, 0, 0)
    p = profile(generate(3, "X_3D", seed=5))
    assert (p.h0_Fm1, p.h1_F, p.h0_omega) == (1, 0, 3)
    p = profile(generate(2, "X_6", seed=5))
    assert (p.h0_Fm1, p.h1_F, p.h0_omega) == (2, 3, 6)


def test_generate_determinism():
    a = generate(2, "X_3", seed=7)
    b = generate(2, "X_3", seed=7)
    assert a == b


# -- duality closure ---------------------------------------------------------------

@pytest.mark.parametrize("chi,sid,expected", [
    (3, "X_3", "X_3D"), (3, "X_3D", "X_3"), (3, "X_0", "X_0"), (3, "X_7", "X_7"),
    (0, "X_3", "X_3D"), (0, "X_3D", "X_3"), (0, "X_0", "X_0"),
    (0, "X_1", "X_1"), (0, "X_2", "X_2"), (0, "X_4", "X_4"),
])
def test_duality_closure(chi, sid, expected):
    P = generate(chi, sid, seed=13)
    label = classify(dual(P))
    assert (label.chi, label.id) == (chi, expected)
    assert get_row(chi, sid).dual_id == expected


# -- dimension audit ----------------------------------------------------------------

def test_dim_audit_hand_anchors():
    a = dim_audit(get_row(1, "X_0"))
    assert (a.dimW, a.dimG, a.dimX) == (90, 53, 37)
    a = dim_audit(get_row(1, "X_5"))
    assert (a.dimW, a.dimG, a.dimX) == (45, 16, 29)
    a = dim_audit(get_row(2, "X_6"))
    assert (a.dimW, a.dimG, a.dimX) == (48, 20, 28)
    a = dim_audit(get_row(3, "X_4"))
    assert (a.dimW, a.dimG, a.dimX) == (41, 9, 32)


def test_dim_audit_corrected_identity_all_rows():
    gaps = {}
    for row in REGISTRY:
        a = dim_audit(row)
        assert a.check_corrected, (row.chi, row.id, a)
        if not a.check:
            gaps[(row.chi, row.id)] = a.stabilizer_dim - a.forced_zero_dims
    # the uncorrected product formula fails exactly on the three strata with
    # positive-dimensional generic stabilizers and no compensating zero cells
    assert gaps == {(1, "X_3"): 6, (2, "X_5"): 3, (3, "X_6"): 6}


def test_stabilizer_dim_matches_forced_zeros_on_flag_rows():
    for chi, sid in [(2, "X_1"), (3, "X_2"), (3, "X_5")]:
        row = get_row(chi, sid)
        P = generate(chi, sid, seed=3)
        z = len(row.zero_cells)
        assert generic_stabilizer_dim(P) == z


# -- verify_row -----------------------------------------------------------------------

def test_verify_row_passes():
    rep = verify_row(1, "X_0", samples=4, seed=21)
    assert rep.passed
    assert rep.attempted == rep.accepted == 4
    assert rep.profile_matches == rep.hilbert_matches == 4


def test_verify_row_report_fields():
    rep = verify_row(3, "X_7", samples=2, seed=22)
    assert rep.passed and not rep.failures
    data = rep.to_json()
    assert data["stratum"] == "X_7" and data["attempted"] == 2
