import pytest
from gmpy2 import mpq
from hypothesis import given

from twistforge.matrices import (
    ExactMatrix,
    NotNilpotentError,
    SingularMatrixError,
    commutator,
    embed_two_leg,
    expand_in_span,
    kron,
    mat_exp_nilpotent,
    mat_inverse,
    mat_log1p_nilpotent,
    mat_mul,
    mat_pow_rational,
    nilpotency_index,
    swap_legs,
)
from twistforge.scalars import EPS, ONE, Scalar

from strategies import matrices, rationals, strictly_upper


def naive_kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Independent dense Kronecker product used as an oracle."""
    da, db = a.dim, b.dim
    out = {}
    for i in range(da):
        for j in range(da):
            for k in range(db):
                for l in range(db):
                    v = a.get(i, j) * b.get(k, l)
                    if v:
                        out[(i * db + k, j * db + l)] = v
    return ExactMatrix(da * db, out)


def unit(dim, i, j):
    return ExactMatrix.unit(dim, i, j)


def test_identity_neutral():
    x = ExactMatrix.from_rows([[1, 2], [3, Scalar(0, 1)]])
    i2 = ExactMatrix.identity(2)
    assert mat_mul(i2, x) == x
    assert mat_mul(x, i2) == x


def test_matrix_unit_composition():
    assert mat_mul(unit(3, 0, 1), unit(3, 1, 2)) == unit(3, 0, 2)
    assert mat_mul(unit(3, 0, 1), unit(3, 0, 1)).is_zero()


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        mat_mul(ExactMatrix.identity(2), ExactMatrix.identity(3))


def test_kron_definition_unfold():
    # e12 (x) e21 in dim 2: single entry at row 0*2+1=1, col 1*2+0=2 of dim 4.
    k = kron(unit(2, 0, 1), unit(2, 1, 0))
    assert k.dim == 4
    assert k.entries == {(1, 2): ONE}
    assert kron(ExactMatrix.identity(3), ExactMatrix.identity(3)) == ExactMatrix.identity(9)


@given(matrices(3), matrices(3), matrices(3), matrices(3))
def test_mixed_product_law(a, b, c, d):
    # (A (x) B)(C (x) D) = (AC) (x) (BD), checked against the dense oracle.
    lhs = mat_mul(kron(a, b), kron(c, d))
    rhs = naive_kron(mat_mul(a, c), mat_mul(b, d))
    assert lhs == rhs


@given(matrices(2), matrices(2), matrices(2))
def test_kron_associativity(a, b, c):
    lhs = kron(kron(a, b), c)
    rhs = naive_kron(a, naive_kron(b, c))
    assert lhs == rhs


def test_exp_two_by_two():
    n = unit(2, 0, 1)
    assert mat_exp_nilpotent(n) == ExactMatrix.from_rows([[1, 1], [0, 1]])
    assert mat_exp_nilpotent(ExactMatrix.zero(3)) == ExactMatrix.identity(3)


def test_exp_three_by_three_with_square():
    n = ExactMatrix.from_rows([[0, 1, 1], [0, 0, 1], [0, 0, 0]])
    sq = mat_mul(n, n)
    assert not sq.is_zero()
    expected = ExactMatrix.identity(3) + n + sq.scale(Scalar(mpq(1, 2)))
    e = mat_exp_nilpotent(n)
    assert e == expected
    assert mat_mul(e, mat_exp_nilpotent(-n)) == ExactMatrix.identity(3)


def test_exp_rejects_non_nilpotent():
    with pytest.raises(NotNilpotentError):
        mat_exp_nilpotent(ExactMatrix.identity(2))


def test_log_square_zero_truncates():
    n = unit(3, 0, 2)
    assert mat_log1p_nilpotent(n) == n
    assert mat_log1p_nilpotent(ExactMatrix.zero(2)).is_zero()


def test_log_exp_roundtrip_4x4():
    n = ExactMatrix.from_rows(
        [[0, 2, Scalar(0, 1), 3], [0, 0, 1, mpq(1, 2)], [0, 0, 0, 5], [0, 0, 0, 0]]
    )
    e = mat_exp_nilpotent(n)
    assert mat_log1p_nilpotent(e - ExactMatrix.identity(4)) == n


@given(strictly_upper(4))
def test_exp_log_roundtrip_property(n):
    e = mat_exp_nilpotent(n)
    assert mat_log1p_nilpotent(e - ExactMatrix.identity(4)) == n


def test_pow_rational_examples():
    i3 = ExactMatrix.identity(3)
    u = i3 + unit(3, 0, 2)
    assert mat_pow_rational(u, mpq(-1, 2)) == i3 - unit(3, 0, 2).scale(Scalar(mpq(1, 2)))
    assert mat_pow_rational(u, 0) == i3

    n = ExactMatrix.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    root = mat_pow_rational(i3 + n, mpq(1, 2))
    assert mat_mul(root, root) == i3 + n


def test_pow_rejects_non_unipotent():
    with pytest.raises(NotNilpotentError):
        mat_pow_rational(ExactMatrix.identity(2).scale(Scalar(2)), mpq(1, 2))


@given(strictly_upper(3), rationals(5, 5), rationals(5, 5))
def test_pow_addition(n, p, q):
    u = ExactMatrix.identity(3) + n
    lhs = mat_mul(mat_pow_rational(u, p), mat_pow_rational(u, q))
    assert lhs == mat_pow_rational(u, p + q)


def test_commutator():
    x = ExactMatrix.from_rows([[1, 2], [3, 4]])
    assert commutator(x, x).is_zero()
    e12, e21 = unit(2, 0, 1), unit(2, 1, 0)
    assert commutator(e12, e21) == ExactMatrix.from_rows([[1, 0], [0, -1]])


def test_eps_extraction():
    r = ExactMatrix.from_rows([[0, mpq(1, 2)], [Scalar(0, 1), 0]])
    m = ExactMatrix.identity(2) + r.scale(EPS)
    assert m.eps_coefficient() == r
    assert m.eps_free() == ExactMatrix.identity(2)


def test_nilpotency_index():
    assert nilpotency_index(ExactMatrix.zero(2)) == 1
    n = ExactMatrix.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert nilpotency_index(n) == 3
    assert nilpotency_index(ExactMatrix.identity(3)) is None


def test_inverse():
    m = ExactMatrix.from_rows([[1, 2, 0], [0, 1, Scalar(0, 1)], [1, 0, 3]])
    inv = mat_inverse(m)
    assert mat_mul(m, inv) == ExactMatrix.identity(3)
    assert mat_mul(inv, m) == ExactMatrix.identity(3)
    with pytest.raises(SingularMatrixError):
        mat_inverse(ExactMatrix.from_rows([[1, 1], [1, 1]]))


def test_inverse_with_eps():
    m = ExactMatrix.identity(2) + unit(2, 0, 1).scale(EPS)
    inv = mat_inverse(m)
    assert mat_mul(m, inv) == ExactMatrix.identity(2)


def test_swap_legs():
    a = ExactMatrix.from_rows([[1, 2], [3, 4]])
    b = ExactMatrix.from_rows([[0, 1], [5, 0]])
    assert swap_legs(kron(a, b), 2) == kron(b, a)


def permutation_matrix(d, total, perm):
    """Matrix sending leg order (1..n) to perm, acting on d**n."""
    n = total
    size = d ** n
    entries = {}
    for idx in range(size):
        digits = []
        rem = idx
        for _ in range(n):
            digits.append(rem % d)
            rem //= d
        digits.reverse()
        new_digits = [0] * n
        for pos, leg in enumerate(perm):
            new_digits[pos] = digits[leg - 1]
        out = 0
        for dg in new_digits:
            out = out * d + dg
        entries[(out, idx)] = ONE
    return ExactMatrix(size, entries)


def test_embed_two_leg_against_permutation_conjugation():
    a = ExactMatrix.from_rows([[0, 1, 0], [2, 0, 0], [0, 0, mpq(1, 3)]])
    b = ExactMatrix.from_rows([[1, 0, 0], [0, 0, 4], [0, 5, 0]])
    f = kron(a, b)
    # Embed into legs (1,3) of 3: compare with P (F (x) I) P^{-1} where P
    # rearranges (1,2,3) -> (1,3,2).
    emb = embed_two_leg(f, 3, 3, (1, 3))
    p = permutation_matrix(3, 3, (1, 3, 2))
    direct = mat_mul(mat_mul(p, kron(f, ExactMatrix.identity(3))), mat_inverse(p))
    assert emb == direct
    # Legs (2,3) and (1,2) reduce to plain Kronecker embeddings.
    assert embed_two_leg(f, 3, 3, (2, 3)) == kron(ExactMatrix.identity(3), f)
    assert embed_two_leg(f, 3, 3, (1, 2)) == kron(f, ExactMatrix.identity(3))


def test_expand_in_span():
    e11 = unit(2, 0, 0)
    e22 = unit(2, 1, 1)
    target = e11.scale(Scalar(3)) - e22.scale(Scalar(mpq(1, 2)))
    coeffs = expand_in_span(target, [e11, e22])
    assert coeffs == [Scalar(3), Scalar(mpq(-1, 2))]
    assert expand_in_span(unit(2, 0, 1), [e11, e22]) is None
