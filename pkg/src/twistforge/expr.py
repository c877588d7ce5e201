"""Expression DAG over abstract algebra generators.

Nodes form a directed acyclic graph, interned so that structurally equal
subtrees are the same object.  Evaluation under a representation is a
unital algebra homomorphism; the analytic nodes (exponential, logarithm,
rational power) evaluate through the terminating nilpotent/unipotent
series and re-validate their precondition on every call.

Leg counts: ``Gen`` and ``One`` are single-leg, ``Tens`` concatenates
legs, every other node preserves the leg count of its children.  An
n-leg expression evaluates to a matrix of dimension ``prod(rep dims)``
over its legs.
"""

from __future__ import annotations

from typing import Dict, Sequence, Tuple, Union

from gmpy2 import mpq

from .matrices import (
    ExactMatrix,
    kron_all,
    mat_exp_nilpotent,
    mat_log1p_nilpotent,
    mat_mul,
    mat_pow_rational,
)
from .reps import Representation
from .scalars import ONE as S_ONE
from .scalars import ZERO as S_ZERO
from .scalars import Scalar, rat


class CounitError(ValueError):
    """Raised when a counit image would be transcendental."""


class Expr:
    __slots__ = ("legs",)

    def __repr__(self):
        return f"<{describe(self)}>"


class OneExpr(Expr):
    __slots__ = ()

    def __init__(self):
        object.__setattr__(self, "legs", 1)


class GenExpr(Expr):
    __slots__ = ("gid",)

    def __init__(self, gid: str):
        object.__setattr__(self, "legs", 1)
        object.__setattr__(self, "gid", gid)


class ScalarMulExpr(Expr):
    __slots__ = ("coeff", "arg")

    def __init__(self, coeff: Scalar, arg: Expr):
        object.__setattr__(self, "legs", arg.legs)
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "arg", arg)


class SumExpr(Expr):
    __slots__ = ("args",)

    def __init__(self, args: Tuple[Expr, ...]):
        object.__setattr__(self, "legs", args[0].legs)
        object.__setattr__(self, "args", args)


class ProdExpr(Expr):
    __slots__ = ("args",)

    def __init__(self, args: Tuple[Expr, ...]):
        object.__setattr__(self, "legs", args[0].legs)
        object.__setattr__(self, "args", args)


class TensExpr(Expr):
    __slots__ = ("args",)

    def __init__(self, args: Tuple[Expr, ...]):
        object.__setattr__(self, "legs", sum(a.legs for a in args))
        object.__setattr__(self, "args", args)


class ExpNilExpr(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        object.__setattr__(self, "legs", arg.legs)
        object.__setattr__(self, "arg", arg)


class Log1pExpr(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        object.__setattr__(self, "legs", arg.legs)
        object.__setattr__(self, "arg", arg)


class PowExpr(Expr):
    __slots__ = ("arg", "exponent")

    def __init__(self, arg: Expr, exponent: mpq):
        object.__setattr__(self, "legs", arg.legs)
        object.__setattr__(self, "arg", arg)
        object.__setattr__(self, "exponent", exponent)


_INTERN: Dict[tuple, Expr] = {}


def _interned(key, builder):
    node = _INTERN.get(key)
    if node is None:
        node = builder()
        _INTERN[key] = node
    return node


ONE: OneExpr = _interned(("one",), OneExpr)


def gen(gid: str) -> GenExpr:
    return _interned(("gen", gid), lambda: GenExpr(gid))


def ones(legs: int = 1) -> Expr:
    """The multiplicative identity on ``legs`` legs."""
    if legs == 1:
        return ONE
    return tens(*([ONE] * legs))


def is_ones(e: Expr) -> bool:
    if e is ONE:
        return True
    return isinstance(e, TensExpr) and all(a is ONE for a in e.args)


def zero(legs: int = 1) -> Expr:
    return _interned(("zero", legs), lambda: ScalarMulExpr(S_ZERO, ones(legs)))


def is_zero(e: Expr) -> bool:
    return isinstance(e, ScalarMulExpr) and e.coeff.is_zero()


def smul(coeff, arg: Expr) -> Expr:
    c = Scalar.of(coeff)
    if isinstance(arg, ScalarMulExpr):
        c = c * arg.coeff
        arg = arg.arg
    if c.is_zero():
        return zero(arg.legs)
    if c.is_one():
        return arg
    return _interned(("smul", c, arg), lambda: ScalarMulExpr(c, arg))


def esum(*args: Expr) -> Expr:
    flat = []
    for a in args:
        if isinstance(a, SumExpr):
            flat.extend(a.args)
        elif not is_zero(a):
            flat.append(a)
    if not args:
        raise ValueError("esum needs at least one argument for the leg count")
    legs = args[0].legs
    if any(a.legs != legs for a in args):
        raise ValueError("sum terms must have equal leg counts")
    if not flat:
        return zero(legs)
    if len(flat) == 1:
        return flat[0]
    key = ("sum", tuple(flat))
    return _interned(key, lambda: SumExpr(tuple(flat)))


def eprod(*args: Expr) -> Expr:
    if not args:
        raise ValueError("eprod needs at least one argument for the leg count")
    legs = args[0].legs
    if any(a.legs != legs for a in args):
        raise ValueError("product factors must have equal leg counts")
    flat = []
    for a in args:
        if isinstance(a, ProdExpr):
            flat.extend(a.args)
        elif is_ones(a):
            continue
        elif is_zero(a):
            return zero(legs)
        else:
            flat.append(a)
    if not flat:
        return ones(legs)
    if len(flat) == 1:
        return flat[0]
    key = ("prod", tuple(flat))
    return _interned(key, lambda: ProdExpr(tuple(flat)))


def tens(*args: Expr) -> Expr:
    flat = []
    for a in args:
        if isinstance(a, TensExpr):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        raise ValueError("tens needs at least one factor")
    if len(flat) == 1:
        return flat[0]
    key = ("tens", tuple(flat))
    return _interned(key, lambda: TensExpr(tuple(flat)))


def exp_nil(arg: Expr) -> Expr:
    if is_zero(arg):
        return ones(arg.legs)
    return _interned(("exp", arg), lambda: ExpNilExpr(arg))


def log1p(arg: Expr) -> Expr:
    if is_zero(arg):
        return zero(arg.legs)
    return _interned(("log1p", arg), lambda: Log1pExpr(arg))


def pow_rat(arg: Expr, exponent) -> Expr:
    q = rat(exponent)
    if q == 0:
        return ones(arg.legs)
    if q == 1:
        return arg
    return _interned(("pow", arg, q), lambda: PowExpr(arg, q))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

Reps = Union[Representation, Sequence[Representation]]

_EVAL_CACHE: Dict[tuple, ExactMatrix] = {}


def _rep_tuple(e: Expr, reps: Reps) -> Tuple[Representation, ...]:
    if isinstance(reps, Representation):
        return (reps,) * e.legs
    reps = tuple(reps)
    if len(reps) != e.legs:
        raise ValueError(f"expression has {e.legs} legs but {len(reps)} representations given")
    return reps


def eval_expr(e: Expr, reps: Reps) -> ExactMatrix:
    """Homomorphic image of ``e`` under one representation per leg."""
    rt = _rep_tuple(e, reps)
    # Key on the objects, not their ids: interned expressions and live
    # representation references cannot be confused by id reuse.
    key = (e, rt)
    cached = _EVAL_CACHE.get(key)
    if cached is not None:
        return cached
    out = _eval(e, rt)
    _EVAL_CACHE[key] = out
    return out


def clear_eval_cache() -> None:
    _EVAL_CACHE.clear()


def _eval(e: Expr, rt: Tuple[Representation, ...]) -> ExactMatrix:
    if e is ONE:
        return ExactMatrix.identity(rt[0].dim)
    if isinstance(e, GenExpr):
        return rt[0].image(e.gid)
    if isinstance(e, ScalarMulExpr):
        return eval_expr(e.arg, rt).scale(e.coeff)
    if isinstance(e, SumExpr):
        out = eval_expr(e.args[0], rt)
        for a in e.args[1:]:
            out = out + eval_expr(a, rt)
        return out
    if isinstance(e, ProdExpr):
        out = eval_expr(e.args[0], rt)
        for a in e.args[1:]:
            out = mat_mul(out, eval_expr(a, rt))
        return out
    if isinstance(e, TensExpr):
        mats = []
        pos = 0
        for a in e.args:
            mats.append(eval_expr(a, rt[pos : pos + a.legs]))
            pos += a.legs
        return kron_all(mats)
    if isinstance(e, ExpNilExpr):
        return mat_exp_nilpotent(eval_expr(e.arg, rt))
    if isinstance(e, Log1pExpr):
        return mat_log1p_nilpotent(eval_expr(e.arg, rt))
    if isinstance(e, PowExpr):
        return mat_pow_rational(eval_expr(e.arg, rt), e.exponent)
    raise TypeError(f"unknown expression node {e!r}")


# ---------------------------------------------------------------------------
# Counit
# ---------------------------------------------------------------------------


def counit_scalar(e: Expr) -> Scalar:
    """Counit of an expression: One -> 1, generators -> 0, homomorphic."""
    if e is ONE:
        return S_ONE
    if isinstance(e, GenExpr):
        return S_ZERO
    if isinstance(e, ScalarMulExpr):
        return e.coeff * counit_scalar(e.arg)
    if isinstance(e, SumExpr):
        out = S_ZERO
        for a in e.args:
            out = out + counit_scalar(a)
        return out
    if isinstance(e, (ProdExpr, TensExpr)):
        out = S_ONE
        for a in e.args:
            out = out * counit_scalar(a)
        return out
    if isinstance(e, ExpNilExpr):
        s = counit_scalar(e.arg)
        if s.is_zero():
            return S_ONE
        raise CounitError("counit of exponential with nonzero scalar argument")
    if isinstance(e, Log1pExpr):
        s = counit_scalar(e.arg)
        if s.is_zero():
            return S_ZERO
        raise CounitError("counit of logarithm with nonzero scalar argument")
    if isinstance(e, PowExpr):
        s = counit_scalar(e.arg)
        if s.is_one():
            return S_ONE
        if e.exponent.denominator == 1:
            k = int(e.exponent)
            if k >= 0:
                return s ** k
            return s.inverse() ** (-k)
        raise CounitError("counit of a non-integral power with base != 1")
    raise TypeError(f"unknown expression node {e!r}")


def counit_leg(e: Expr, leg: int) -> Expr:
    """Collapse one leg by the counit; the result has one leg fewer."""
    if not 1 <= leg <= e.legs:
        raise ValueError(f"leg {leg} out of range for {e.legs}-leg expression")
    if e.legs < 2:
        raise ValueError("cannot collapse the only leg; use counit_scalar")
    if isinstance(e, ScalarMulExpr):
        return smul(e.coeff, counit_leg(e.arg, leg))
    if isinstance(e, SumExpr):
        return esum(*(counit_leg(a, leg) for a in e.args))
    if isinstance(e, ProdExpr):
        return eprod(*(counit_leg(a, leg) for a in e.args))
    if isinstance(e, TensExpr):
        pos = 0
        for i, a in enumerate(e.args):
            if pos < leg <= pos + a.legs:
                rest = e.args[:i] + e.args[i + 1 :]
                if a.legs == 1:
                    return smul(counit_scalar(a), tens(*rest))
                inner = counit_leg(a, leg - pos)
                return tens(*(e.args[:i] + (inner,) + e.args[i + 1 :]))
            pos += a.legs
    if isinstance(e, ExpNilExpr):
        return exp_nil(counit_leg(e.arg, leg))
    if isinstance(e, Log1pExpr):
        return log1p(counit_leg(e.arg, leg))
    if isinstance(e, PowExpr):
        return pow_rat(counit_leg(e.arg, leg), e.exponent)
    raise TypeError(f"cannot apply counit_leg to {e!r}")


# ---------------------------------------------------------------------------
# Coproduct
# ---------------------------------------------------------------------------


def coproduct_leg(e: Expr, leg: int) -> Expr:
    """Split one leg primitively: Gen -> Gen(x)1 + 1(x)Gen in that leg.

    Non-generator nodes map homomorphically; the analytic nodes wrap the
    split argument, matching the fact that the coproduct is an algebra
    homomorphism on the envelope.
    """
    if not 1 <= leg <= e.legs:
        raise ValueError(f"leg {leg} out of range for {e.legs}-leg expression")
    if e is ONE:
        return tens(ONE, ONE)
    if isinstance(e, GenExpr):
        return esum(tens(e, ONE), tens(ONE, e))
    if isinstance(e, ScalarMulExpr):
        return smul(e.coeff, coproduct_leg(e.arg, leg))
    if isinstance(e, SumExpr):
        return esum(*(coproduct_leg(a, leg) for a in e.args))
    if isinstance(e, ProdExpr):
        return eprod(*(coproduct_leg(a, leg) for a in e.args))
    if isinstance(e, TensExpr):
        pos = 0
        for i, a in enumerate(e.args):
            if pos < leg <= pos + a.legs:
                inner = coproduct_leg(a, leg - pos)
                return tens(*(e.args[:i] + (inner,) + e.args[i + 1 :]))
            pos += a.legs
    if isinstance(e, ExpNilExpr):
        return exp_nil(coproduct_leg(e.arg, leg))
    if isinstance(e, Log1pExpr):
        return log1p(coproduct_leg(e.arg, leg))
    if isinstance(e, PowExpr):
        return pow_rat(coproduct_leg(e.arg, leg), e.exponent)
    raise TypeError(f"cannot apply coproduct_leg to {e!r}")


# ---------------------------------------------------------------------------
# Leg permutation and embedding
# ---------------------------------------------------------------------------


def permute_legs(e: Expr, perm: Sequence[int]) -> Expr:
    """Reorder legs; ``perm[i]`` names the old leg placed at position i+1."""
    perm = tuple(perm)
    if sorted(perm) != list(range(1, e.legs + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{e.legs}")
    if perm == tuple(range(1, e.legs + 1)):
        return e
    return _permute(e, perm)


def _permute(e: Expr, perm: Tuple[int, ...]) -> Expr:
    if isinstance(e, ScalarMulExpr):
        return smul(e.coeff, _permute(e.arg, perm))
    if isinstance(e, SumExpr):
        return esum(*(_permute(a, perm) for a in e.args))
    if isinstance(e, ProdExpr):
        return eprod(*(_permute(a, perm) for a in e.args))
    if isinstance(e, ExpNilExpr):
        return exp_nil(_permute(e.arg, perm))
    if isinstance(e, Log1pExpr):
        return log1p(_permute(e.arg, perm))
    if isinstance(e, PowExpr):
        return pow_rat(_permute(e.arg, perm), e.exponent)
    if isinstance(e, TensExpr):
        if all(a.legs == 1 for a in e.args):
            return tens(*(e.args[p - 1] for p in perm))
        # Block-respecting permutations: each multi-leg entry must be moved
        # as a contiguous block with its internal order preserved.
        blocks = []
        pos = 1
        for a in e.args:
            blocks.append(tuple(range(pos, pos + a.legs)))
            pos += a.legs
        order = []
        i = 0
        while i < len(perm):
            for bi, block in enumerate(blocks):
                if perm[i] == block[0] and tuple(perm[i : i + len(block)]) == block:
                    order.append(bi)
                    i += len(block)
                    break
            else:
                raise ValueError("permutation splits a fused multi-leg factor")
        return tens(*(e.args[bi] for bi in order))
    raise TypeError(f"cannot permute legs of {e!r}")


def embed_legs(e: Expr, positions: Sequence[int], total: int) -> Expr:
    """Place the legs of ``e`` at ``positions`` in a larger identity tensor."""
    positions = tuple(positions)
    if len(positions) != e.legs or sorted(set(positions)) != sorted(positions):
        raise ValueError("positions must be distinct, one per leg")
    if any(not 1 <= p <= total for p in positions):
        raise ValueError("positions out of range")
    if e.legs == total and positions == tuple(range(1, total + 1)):
        return e
    padded = tens(e, *([ONE] * (total - e.legs))) if total > e.legs else e
    # padded has e's legs first, then identity legs; build the permutation
    # placing old leg i at positions[i-1].
    target = [0] * total
    old_position = {}
    for i, p in enumerate(positions, start=1):
        old_position[p] = i
    next_idle = e.legs
    for p in range(1, total + 1):
        if p in old_position:
            target[p - 1] = old_position[p]
        else:
            next_idle += 1
            target[p - 1] = next_idle
    return permute_legs(padded, target)


# ---------------------------------------------------------------------------
# Description / serialization helpers
# ---------------------------------------------------------------------------


def describe(e: Expr) -> str:
    if e is ONE:
        return "1"
    if isinstance(e, GenExpr):
        return e.gid
    if isinstance(e, ScalarMulExpr):
        return f"({e.coeff})*{describe(e.arg)}"
    if isinstance(e, SumExpr):
        return "(" + " + ".join(describe(a) for a in e.args) + ")"
    if isinstance(e, ProdExpr):
        return " ".join(describe(a) for a in e.args)
    if isinstance(e, TensExpr):
        return " (x) ".join(describe(a) for a in e.args)
    if isinstance(e, ExpNilExpr):
        return f"exp({describe(e.arg)})"
    if isinstance(e, Log1pExpr):
        return f"log1p({describe(e.arg)})"
    if isinstance(e, PowExpr):
        return f"({describe(e.arg)})^({e.exponent})"
    return "?"


def expr_to_json(e: Expr):
    if e is ONE:
        return {"op": "one"}
    if isinstance(e, GenExpr):
        return {"op": "gen", "id": e.gid}
    if isinstance(e, ScalarMulExpr):
        return {"op": "smul", "coeff": str(e.coeff), "arg": expr_to_json(e.arg)}
    if isinstance(e, SumExpr):
        return {"op": "sum", "args": [expr_to_json(a) for a in e.args]}
    if isinstance(e, ProdExpr):
        return {"op": "prod", "args": [expr_to_json(a) for a in e.args]}
    if isinstance(e, TensExpr):
        return {"op": "tens", "args": [expr_to_json(a) for a in e.args]}
    if isinstance(e, ExpNilExpr):
        return {"op": "exp", "arg": expr_to_json(e.arg)}
    if isinstance(e, Log1pExpr):
        return {"op": "log1p", "arg": expr_to_json(e.arg)}
    if isinstance(e, PowExpr):
        return {"op": "pow", "exponent": str(e.exponent), "arg": expr_to_json(e.arg)}
    raise TypeError(f"cannot serialize {e!r}")


def expr_from_json(data) -> Expr:
    from .scalars import parse_scalar

    op = data["op"]
    if op == "one":
        return ONE
    if op == "gen":
        return gen(data["id"])
    if op == "smul":
        return smul(parse_scalar(data["coeff"]), expr_from_json(data["arg"]))
    if op == "sum":
        return esum(*(expr_from_json(a) for a in data["args"]))
    if op == "prod":
        return eprod(*(expr_from_json(a) for a in data["args"]))
    if op == "tens":
        return tens(*(expr_from_json(a) for a in data["args"]))
    if op == "exp":
        return exp_nil(expr_from_json(data["arg"]))
    if op == "log1p":
        return log1p(expr_from_json(data["arg"]))
    if op == "pow":
        return pow_rat(expr_from_json(data["arg"]), mpq(data["exponent"]))
    raise ValueError(f"unknown expression op {op!r}")
