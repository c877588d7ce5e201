import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from twistforge.expr import (
    ONE,
    CounitError,
    coproduct_leg,
    counit_leg,
    counit_scalar,
    embed_legs,
    eprod,
    esum,
    eval_expr,
    exp_nil,
    expr_from_json,
    expr_to_json,
    gen,
    log1p,
    ones,
    permute_legs,
    pow_rat,
    smul,
    tens,
    zero,
)
from twistforge.matrices import ExactMatrix, kron, mat_log1p_nilpotent, mat_mul
from twistforge.reps import Representation
from twistforge.scalars import ONE as S_ONE
from twistforge.scalars import Scalar

from strategies import rationals


def solvable_rep(alpha=mpq(1, 2)):
    """Faithful 3x3 image of the four-generator solvable carrier."""
    e = ExactMatrix.unit
    images = {
        "A": e(3, 0, 1),
        "B": e(3, 1, 2),
        "E": e(3, 0, 2),
        "H": ExactMatrix(3, {(0, 0): Scalar(alpha), (2, 2): Scalar(alpha - 1)}),
    }
    return Representation("defining", 3, images)


REP = solvable_rep()
A, B, E, H = gen("A"), gen("B"), gen("E"), gen("H")


def test_eval_one_and_gen():
    assert eval_expr(ONE, REP) == ExactMatrix.identity(3)
    assert eval_expr(A, REP) == REP.image("A")


def test_eval_is_multiplicative():
    x = esum(A, smul(Scalar(2), B))
    y = eprod(E, esum(ONE, A))
    assert eval_expr(eprod(x, y), REP) == mat_mul(eval_expr(x, REP), eval_expr(y, REP))


def test_commutator_of_A_B_gives_E():
    diff = esum(eprod(A, B), smul(Scalar(-1), eprod(B, A)))
    assert eval_expr(diff, REP) == REP.image("E")


def test_log1p_of_square_zero_generator():
    # E has E^2 = 0 in this representation, so the series truncates.
    assert eval_expr(log1p(E), REP) == REP.image("E")


def test_analytic_nodes_check_nilpotency():
    from twistforge.matrices import NotNilpotentError

    with pytest.raises(NotNilpotentError):
        eval_expr(exp_nil(esum(ONE, E)), REP)


def test_unknown_generator_raises():
    with pytest.raises(KeyError):
        eval_expr(gen("Q"), REP)


def test_coproduct_primitivity():
    split = coproduct_leg(E, 1)
    img = eval_expr(split, (REP, REP))
    rho = REP.image("E")
    i3 = ExactMatrix.identity(3)
    assert img == kron(rho, i3) + kron(i3, rho)


def test_coproduct_of_log1p_truncates_at_three():
    split = coproduct_leg(log1p(E), 1)
    rho = REP.image("E")
    i3 = ExactMatrix.identity(3)
    n = kron(rho, i3) + kron(i3, rho)
    assert mat_mul(mat_mul(n, n), n).is_zero()
    assert not mat_mul(n, n).is_zero()
    assert eval_expr(split, (REP, REP)) == mat_log1p_nilpotent(n)


def test_coproduct_leg_counts():
    t = tens(A, B)
    assert coproduct_leg(t, 1).legs == 3
    assert coproduct_leg(t, 2).legs == 3


def test_counit_scalar():
    assert counit_scalar(ONE) == S_ONE
    assert counit_scalar(A).is_zero()
    assert counit_scalar(pow_rat(esum(ONE, E), mpq(-1, 2))) == S_ONE
    assert counit_scalar(log1p(E)).is_zero()
    with pytest.raises(CounitError):
        counit_scalar(pow_rat(esum(ONE, ONE), mpq(1, 2)))


def test_counit_axiom_on_expressions():
    # (eps (x) id) after a primitive split is the identity, at matrix level.
    for x in (A, B, E, H, eprod(A, B), esum(A, smul(Scalar(3), E))):
        split = coproduct_leg(x, 1)
        assert eval_expr(counit_leg(split, 1), REP) == eval_expr(x, REP)
        assert eval_expr(counit_leg(split, 2), REP) == eval_expr(x, REP)


def test_permute_legs():
    sigma = log1p(E)
    t = tens(H, sigma)
    assert permute_legs(t, (1, 2)) is t
    swapped = permute_legs(t, (2, 1))
    assert swapped is tens(sigma, H)
    assert permute_legs(swapped, (2, 1)) is t


def test_permute_commutes_with_evaluation():
    t = tens(A, eprod(B, esum(ONE, E)))
    direct = eval_expr(permute_legs(t, (2, 1)), (REP, REP))
    m = eval_expr(t, (REP, REP))
    from twistforge.matrices import swap_legs

    assert direct == swap_legs(m, 3)


def test_embed_legs():
    t = tens(A, B)
    emb = embed_legs(t, (1, 3), 3)
    got = eval_expr(emb, (REP, REP, REP))
    from twistforge.matrices import embed_two_leg

    want = embed_two_leg(eval_expr(t, (REP, REP)), 3, 3, (1, 3))
    assert got == want


def test_zero_and_ones():
    assert eval_expr(zero(2), (REP, REP)).is_zero()
    assert eval_expr(ones(2), (REP, REP)) == ExactMatrix.identity(9)


def test_interning_gives_structural_identity():
    x1 = eprod(A, smul(Scalar(mpq(1, 2)), B))
    x2 = eprod(A, smul(Scalar(mpq(1, 2)), B))
    assert x1 is x2


def test_json_roundtrip():
    x = esum(
        tens(H, log1p(smul(Scalar(mpq(1, 3)), E))),
        smul(Scalar(2, 1), tens(A, eprod(B, pow_rat(esum(ONE, E), mpq(-1, 2))))),
    )
    assert expr_from_json(expr_to_json(x)) is x


# --- randomized coassociativity ------------------------------------------


def leaf_pool():
    return st.sampled_from([A, B, E, H, ONE])


def nilpotent_pool():
    return st.sampled_from([A, B, E])


def expressions():
    base = leaf_pool()

    def extend(children):
        return st.one_of(
            st.builds(lambda xs: esum(*xs), st.lists(children, min_size=1, max_size=3)),
            st.builds(lambda xs: eprod(*xs), st.lists(children, min_size=1, max_size=3)),
            st.builds(smul, rationals(), children),
        )

    analytic = st.one_of(
        st.builds(lambda c, x: exp_nil(smul(c, x)), rationals(), nilpotent_pool()),
        st.builds(lambda c, x: log1p(smul(c, x)), rationals(), nilpotent_pool()),
        st.builds(
            lambda c, x, q: pow_rat(esum(ONE, smul(c, x)), q),
            rationals(),
            nilpotent_pool(),
            rationals(3, 3),
        ),
    )
    return st.recursive(st.one_of(base, analytic), extend, max_leaves=6)


@given(expressions())
def test_coassociativity_at_matrix_level(x):
    once = coproduct_leg(x, 1)
    left = coproduct_leg(once, 1)
    right = coproduct_leg(once, 2)
    reps = (REP, REP, REP)
    assert eval_expr(left, reps) == eval_expr(right, reps)


@given(expressions(), expressions())
def test_eval_multiplicative_property(x, y):
    assert eval_expr(eprod(x, y), REP) == mat_mul(eval_expr(x, REP), eval_expr(y, REP))
