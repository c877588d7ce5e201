from gmpy2 import mpq

from twistforge.expr import ONE, esum, gen, log1p, pow_rat
from twistforge.matrices import ExactMatrix, embed_two_leg, kron, mat_mul, swap_legs
from twistforge.scalars import Scalar
from twistforge.tensors import TensorPoly, TwistElement

from test_expr import REP

A, B, E, H = gen("A"), gen("B"), gen("E"), gen("H")
SIGMA = log1p(E)
I3 = ExactMatrix.identity(3)


def test_canonical_merging():
    p = TensorPoly(2, [(Scalar(1), (A, B)), (Scalar(2), (A, B)), (Scalar(-3), (A, B))])
    assert p.is_zero()
    q = TensorPoly.single(Scalar(1), A, B) + TensorPoly.single(Scalar(1), B, A)
    assert len(q.terms) == 2


def test_empty_poly_evaluates_to_zero():
    assert TensorPoly.zero(2).eval(REP).is_zero()
    assert TensorPoly.zero(2).eval(REP).dim == 9


def test_eval_matches_manual_kron():
    p = TensorPoly.single(Scalar(mpq(1, 2)), H, SIGMA)
    assert p.eval(REP) == kron(REP.image("H"), REP.image("E")).scale(Scalar(mpq(1, 2)))


def test_coproduct_leg_flat_split():
    p = TensorPoly.single(Scalar(1), H, SIGMA)
    split = p.coproduct_leg(1)
    assert split.legs == 3
    # H is primitive: two flat terms.
    assert len(split.terms) == 2
    rho_h, rho_e = REP.image("H"), REP.image("E")
    want = kron(kron(rho_h, I3), rho_e) + kron(kron(I3, rho_h), rho_e)
    assert split.eval(REP) == want


def test_coproduct_leg_wrapped_fallback():
    p = TensorPoly.single(Scalar(1), H, SIGMA)
    split = p.coproduct_leg(2)
    assert split.legs == 3
    # log1p cannot be expanded flat; the entry stays fused.
    term_entries = split.terms[0][1]
    assert any(e.legs == 2 for e in term_entries)
    rho_h, rho_e = REP.image("H"), REP.image("E")
    from twistforge.matrices import mat_log1p_nilpotent

    n = kron(rho_e, I3) + kron(I3, rho_e)
    want = kron(rho_h, mat_log1p_nilpotent(n))
    assert split.eval(REP) == want


def test_counit_leg():
    p = TensorPoly.single(Scalar(1), H, SIGMA)
    # counit on the H leg: eps(H) = 0, so everything dies.
    assert p.counit_leg(1).is_zero()
    # counit on a pure One leg multiplies by 1.
    q = TensorPoly.single(Scalar(mpq(2, 3)), ONE, A)
    assert q.counit_leg(1) == TensorPoly.single(Scalar(mpq(2, 3)), A)


def test_permute_and_embed():
    p = TensorPoly.single(Scalar(1), H, SIGMA)
    swapped = p.permute_legs((2, 1))
    assert swapped == TensorPoly.single(Scalar(1), SIGMA, H)
    m = p.eval(REP)
    assert swapped.eval(REP) == swap_legs(m, 3)

    emb = p.embed((1, 3), 3)
    assert emb.eval(REP) == embed_two_leg(m, 3, 3, (1, 3))
    assert p.embed((2, 3), 3).eval(REP) == embed_two_leg(m, 3, 3, (2, 3))


def test_permute_roundtrip():
    p = TensorPoly.single(Scalar(1), A, B) + TensorPoly.single(Scalar(2, 1), E, H)
    for perm, inv in (((2, 1), (2, 1)),):
        assert p.permute_legs(perm).permute_legs(inv) == p


def test_twist_identity_and_inverse():
    t = TwistElement.identity(2)
    assert t.eval(REP) == ExactMatrix.identity(9)

    phi_j = TensorPoly.single(Scalar(1), H, SIGMA)
    phi_e = TensorPoly.single(Scalar(1), A, eprod_b_exp())
    tw = TwistElement(2, [phi_e, phi_j])
    m = tw.eval(REP)
    minv = tw.inverse().eval(REP)
    assert mat_mul(m, minv) == ExactMatrix.identity(9)


def eprod_b_exp():
    from twistforge.expr import eprod

    return eprod(B, pow_rat(esum(ONE, E), mpq(-1, 2)))


def test_twist_eval_order_is_rightmost_first():
    phi_j = TensorPoly.single(Scalar(1), H, SIGMA)
    phi_e = TensorPoly.single(Scalar(1), A, eprod_b_exp())
    tw = TwistElement(2, [phi_e, phi_j])
    from twistforge.matrices import mat_exp_nilpotent

    want = mat_mul(
        mat_exp_nilpotent(phi_e.eval(REP)), mat_exp_nilpotent(phi_j.eval(REP))
    )
    assert tw.eval(REP) == want


def test_twist_coproduct_and_counit_legs():
    phi_j = TensorPoly.single(Scalar(1), H, SIGMA)
    tw = TwistElement(2, [phi_j])
    assert tw.coproduct_leg(1).legs == 3
    # (eps (x) id) of exp(H (x) sigma) is exp(0) = identity.
    collapsed = tw.counit_leg(1)
    assert collapsed.legs == 1
    assert collapsed.eval(REP) == I3


def test_twist_json_roundtrip():
    phi_j = TensorPoly.single(Scalar(1), H, SIGMA)
    phi_e = TensorPoly.single(Scalar(mpq(1, 2)), A, eprod_b_exp())
    tw = TwistElement(2, [phi_e, phi_j])
    again = TwistElement.from_json(tw.to_json())
    assert again == tw


def test_poly_json_is_deterministic():
    import json

    p = TensorPoly.single(Scalar(1), H, SIGMA) + TensorPoly.single(Scalar(2), A, B)
    s1 = json.dumps(p.to_json(), sort_keys=True)
    s2 = json.dumps(TensorPoly.from_json(p.to_json()).to_json(), sort_keys=True)
    assert s1 == s2
