import random

import pytest

from planesheaves.presentation import (InconsistentPresentationError,
                                       Presentation, PresentationError,
                                       dual, graded_piece, h0_omega, h0_twist,
                                       h1_omega, h1_twist, hilbert,
                                       is_injective, profile,
                                       random_equivalence, twist)
from planesheaves.strata import generate

SEXTIC = "X^6 + Y^6 + Z^6 + X*Y*Z^4 + 2*X^2*Y^2*Z^2"


def oc2() -> Presentation:
    return Presentation.from_text([-4], [2], [[SEXTIC]])


def table_rows():
    return [generate(1, "X_0", seed=10), generate(3, "X_0", seed=10),
            generate(3, "X_7", seed=10), generate(0, "X_4", seed=10)]


# -- validation -------------------------------------------------------------

def test_validate_accepts_chi1_open_shape():
    P = generate(1, "X_0", seed=0)
    assert P.source == (-2,) * 5
    assert P.target == (-1, -1, -1, -1, 0)


def test_validate_rejects_wrong_degree():
    with pytest.raises(PresentationError) as err:
        Presentation.from_text([-2], [-1], [["X^2"]])
    assert "(0, 0)" in str(err.value)


def test_validate_rejects_nonzero_in_negative_slot():
    with pytest.raises(PresentationError):
        Presentation.from_text([-1, 0], [-1, 0], [["1", "1"], ["X", "1"]])


def test_validate_sorts_twists():
    P = Presentation.from_text([0, -1], [1, 0], [["X", "X^2"], ["1", "X"]])
    assert P.source == (-1, 0)
    assert P.target == (0, 1)
    # entry degrees follow the sorted twists
    assert P.matrix[0][0].degree == 1 and P.matrix[1][1].degree == 1
    assert P.matrix[1][0].degree == 2 and P.matrix[0][1].degree == 0


# -- hilbert ----------------------------------------------------------------

def test_hilbert_examples():
    x0 = hilbert(generate(1, "X_0", seed=1))
    assert (x0.r, x0.chi) == (6, 1)
    hd = hilbert(oc2())
    assert (hd.r, hd.chi) == (6, 3)
    line = Presentation.from_text([-1], [0], [["X"]])
    assert (hilbert(line).r, hilbert(line).chi) == (1, 1)


def test_hilbert_rejects_non_square():
    P = Presentation.from_text([-1], [0, 0], [["X"], ["Y"]])
    with pytest.raises(PresentationError):
        hilbert(P)


# -- injectivity ------------------------------------------------------------

def test_injective_diag():
    P = Presentation.from_text([-1, -1], [0, 0], [["X", "0"], ["0", "Y"]])
    assert is_injective(P)


def test_not_injective_identical_columns():
    P = Presentation.from_text([-1, -1], [0, 0], [["X", "X"], ["Y", "Y"]])
    assert not is_injective(P)


def test_injective_conic_matrix():
    P = generate(3, "X_0", seed=2)
    assert is_injective(P)


# -- twisted cohomology -----------------------------------------------------

def test_h0_twist_examples():
    x5 = Presentation.from_text(
        [-4, -1], [0, 1],
        [["X^4 + Y^4", "X"], ["X^5 + Z^5", "Y^2 + X*Z"]])
    assert h0_twist(x5, 0) == 4
    assert h0_twist(x5, -1) == 1
    assert h0_twist(oc2(), -1) == 3
    assert h0_twist(x5, -4) == 0


def test_h1_twist_examples():
    x5 = Presentation.from_text(
        [-4, -1], [0, 1],
        [["X^4 + Y^4", "X"], ["X^5 + Z^5", "Y^2 + X*Z"]])
    assert h1_twist(x5, 0) == 3
    assert h1_twist(oc2(), 0) == 3
    assert h1_twist(generate(1, "X_0", seed=3), 0) == 0


def test_h1_twist_flags_inconsistent_input():
    # a forced zero row can never be injective; the arithmetic goes negative
    P = Presentation.from_text([0, 0], [-2, 10], [["0", "0"], ["X^10", "Y^10"]])
    with pytest.raises(InconsistentPresentationError):
        h1_twist(P, -4)


def test_graded_piece_dims():
    P = oc2()
    g0 = graded_piece(P, 0)
    assert (g0.ambient_dim, g0.image_rank, g0.dim) == (6, 0, 6)
    g2 = graded_piece(P, 2)
    assert (g2.ambient_dim, g2.image_rank, g2.dim) == (15, 0, 15)
    assert g2.dim == h0_twist(P, 2)
    g4 = graded_piece(P, 4)
    assert (g4.ambient_dim, g4.image_rank, g4.dim) == (28, 1, 27)
    assert graded_piece(generate(1, "X_0", seed=3), 0).dim == 1


def test_h0_omega_examples():
    assert h0_omega(oc2()) == 8
    assert h0_omega(generate(3, "X_0", seed=4)) == 0
    assert h0_omega(generate(2, "X_6", seed=4)) == 6


def test_h1_omega_examples():
    assert h1_omega(oc2()) == 8  # alternating sum 8 - 18 + 10 + 9 - 1
    assert h1_omega(generate(3, "X_0", seed=4)) == 0
    assert h1_omega(generate(1, "X_0", seed=4)) == 4


def test_profile_examples():
    assert profile(oc2()).as_tuple() == (3, 3, 8, 1)
    assert profile(generate(1, "X_0", seed=5)).as_tuple() == (0, 0, 0, 0)
    p6 = profile(generate(2, "X_6", seed=5))
    assert (p6.h0_Fm1, p6.h1_F, p6.h0_omega) == (2, 3, 6)


# -- duality and twisting ---------------------------------------------------

def test_dual_oc2():
    D = dual(oc2())
    assert (D.source, D.target) == ((-5,), (1,))
    hd = hilbert(D)
    assert (hd.r, hd.chi) == (6, -3)


def test_dual_self_shaped():
    P = generate(0, "X_0", seed=6)
    D = dual(P)
    assert (D.source, D.target) == ((-2,) * 6, (-1,) * 6)


def test_dual_chi0_x3_lands_on_x3d_shape():
    P = generate(0, "X_3", seed=6)
    D = dual(P)
    assert (D.source, D.target) == ((-3, -3, -3), (-2, -2, 1))


def test_dual_involution_and_serre():
    for P in table_rows():
        hd = hilbert(P)
        DD = dual(dual(P))
        assert (DD.source, DD.target) == (P.source, P.target)
        assert hilbert(DD) == hd
        D = dual(P)
        for t in range(-3, 4):
            assert h1_twist(P, t) == h0_twist(D, -t)


def test_twist_shift():
    P = oc2()
    Q = twist(P, -1)
    assert (Q.source, Q.target) == ((-5,), (1,))
    assert hilbert(Q).chi == -3
    assert twist(Q, 1) == P
    for R in table_rows():
        assert hilbert(twist(R, 1)).chi - hilbert(R).chi == 6


# -- structural invariants --------------------------------------------------

def test_riemann_roch_identity():
    for P in table_rows():
        hd = hilbert(P)
        for t in range(-4, 5):
            assert h0_twist(P, t) - h1_twist(P, t) == hd.value(t)


def test_euler_contraction_characteristic():
    for P in table_rows():
        hd = hilbert(P)
        assert h0_omega(P) - h1_omega(P) == 2 * hd.chi - hd.r


def test_group_action_preserves_cohomology():
    rng = random.Random(15)
    for P in [generate(1, "X_5", seed=7), generate(2, "X_3", seed=7)]:
        base = (h0_twist(P, 0), h0_omega(P))
        for _ in range(3):
            Q = random_equivalence(P, rng)
            assert is_injective(Q)
            assert (h0_twist(Q, 0), h0_omega(Q)) == base


# -- JSON round trip ----------------------------------------------------------

def test_json_roundtrip_bit_exact():
    import json
    for P in table_rows():
        blob = json.dumps(P.to_json(), sort_keys=True)
        Q = Presentation.from_json(json.loads(blob))
        assert Q == P
        assert json.dumps(Q.to_json(), sort_keys=True) == blob


def test_nonminimal_presentation_accepted():
    # a cancelling pair of O(0) summands wrapped around a sextic
    P = Presentation.from_text(
        [-4, 0], [0, 2],
        [["X^4", "1"], ["X^6 + Y^6 + Z^6", "X^2"]])
    hd = hilbert(P)
    assert (hd.r, hd.chi) == (6, 3)
    assert profile(P).as_tuple() == (3, 3, 8, 1)
