"""Scalar-weighted sums of tensor-leg expressions, and twist elements.

A :class:`TensorPoly` is a canonical sum of terms ``coeff * (e_1 (x) ... (x) e_m)``
where each entry is an expression spanning one or more legs (entries are
single-leg in all inputs; multi-leg entries arise when a coproduct cannot
be expanded into finitely many elementary tensors and is kept wrapped
inside an analytic node instead).

A :class:`TwistElement` is an ordered product of exponential factors,
each the exponential of a tensor polynomial whose representation image
is nilpotent.  Factors are stored in product order: ``factors[0]`` is
the leftmost factor, i.e. the last twist applied.
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Sequence, Tuple

from .expr import (
    ONE,
    Expr,
    GenExpr,
    ProdExpr,
    ScalarMulExpr,
    SumExpr,
    coproduct_leg as expr_coproduct_leg,
    counit_leg as expr_counit_leg,
    counit_scalar,
    esum,
    eval_expr,
    expr_from_json,
    expr_to_json,
    eprod,
    is_zero,
    smul,
    tens,
)
from .matrices import ExactMatrix, mat_exp_nilpotent, mat_mul
from .reps import Representation
from .scalars import ONE as S_ONE
from .scalars import Scalar, parse_scalar

Term = Tuple[Scalar, Tuple[Expr, ...]]


def _merge_terms(terms: Iterable[Term]) -> Tuple[Term, ...]:
    acc: Dict[Tuple[Expr, ...], Scalar] = {}
    order: List[Tuple[Expr, ...]] = []
    for coeff, entries in terms:
        if not coeff:
            continue
        if entries in acc:
            acc[entries] = acc[entries] + coeff
        else:
            acc[entries] = coeff
            order.append(entries)
    return tuple((acc[k], k) for k in order if acc[k])


class TensorPoly:
    __slots__ = ("legs", "terms")

    def __init__(self, legs: int, terms: Iterable[Term] = ()):
        object.__setattr__(self, "legs", legs)
        merged = _merge_terms(terms)
        for _, entries in merged:
            total = sum(e.legs for e in entries)
            if total != legs:
                raise ValueError(f"term spans {total} legs, expected {legs}")
        object.__setattr__(self, "terms", merged)

    def __setattr__(self, name, value):
        raise AttributeError("TensorPoly is immutable")

    # -- construction ---------------------------------------------------

    @staticmethod
    def zero(legs: int) -> "TensorPoly":
        return TensorPoly(legs)

    @staticmethod
    def single(coeff, *entries: Expr) -> "TensorPoly":
        legs = sum(e.legs for e in entries)
        return TensorPoly(legs, [(Scalar.of(coeff), tuple(entries))])

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TensorPoly") -> "TensorPoly":
        if self.legs != other.legs:
            raise ValueError("leg count mismatch")
        return TensorPoly(self.legs, self.terms + other.terms)

    def scale(self, c) -> "TensorPoly":
        s = Scalar.of(c)
        return TensorPoly(self.legs, [(s * coeff, entries) for coeff, entries in self.terms])

    def __neg__(self) -> "TensorPoly":
        return self.scale(Scalar(-1))

    def mul(self, other: "TensorPoly") -> "TensorPoly":
        """Legwise product; defined for aligned single-leg entry tuples."""
        if self.legs != other.legs:
            raise ValueError("leg count mismatch")
        out: List[Term] = []
        for c1, ents1 in self.terms:
            for c2, ents2 in other.terms:
                if len(ents1) != len(ents2) or any(
                    a.legs != b.legs for a, b in zip(ents1, ents2)
                ):
                    raise ValueError("tensor products require aligned entries")
                out.append((c1 * c2, tuple(eprod(a, b) for a, b in zip(ents1, ents2))))
        return TensorPoly(self.legs, out)

    def __eq__(self, other):
        if not isinstance(other, TensorPoly):
            return NotImplemented
        return self.legs == other.legs and set(self.terms) == set(other.terms)

    def __hash__(self):
        return hash((self.legs, frozenset(self.terms)))

    def __repr__(self):
        return f"TensorPoly(legs={self.legs}, terms={len(self.terms)})"

    # -- conversion / evaluation ------------------------------------------

    def to_expr(self) -> Expr:
        from .expr import zero as expr_zero

        if not self.terms:
            return expr_zero(self.legs)
        parts = [
            smul(coeff, tens(*entries) if len(entries) > 1 else entries[0])
            for coeff, entries in self.terms
        ]
        return esum(*parts)

    def eval(self, reps) -> ExactMatrix:
        return eval_expr(self.to_expr(), reps)

    # -- hopf-structure operations ----------------------------------------

    def coproduct_leg(self, leg: int) -> "TensorPoly":
        if not 1 <= leg <= self.legs:
            raise ValueError(f"leg {leg} out of range")
        out: List[Term] = []
        for coeff, entries in self.terms:
            pos = 0
            for i, entry in enumerate(entries):
                if pos < leg <= pos + entry.legs:
                    local = leg - pos
                    break
                pos += entry.legs
            else:
                raise AssertionError("leg not located")
            if entry.legs == 1:
                split = split_coproduct(entry)
                if split is not None:
                    for c2, a, b in split:
                        out.append((coeff * c2, entries[:i] + (a, b) + entries[i + 1 :]))
                    continue
            wrapped = expr_coproduct_leg(entry, local)
            out.append((coeff, entries[:i] + (wrapped,) + entries[i + 1 :]))
        return TensorPoly(self.legs + 1, out)

    def counit_leg(self, leg: int) -> "TensorPoly":
        if not 1 <= leg <= self.legs:
            raise ValueError(f"leg {leg} out of range")
        if self.legs < 2:
            raise ValueError("cannot collapse the only leg")
        out: List[Term] = []
        for coeff, entries in self.terms:
            pos = 0
            for i, entry in enumerate(entries):
                if pos < leg <= pos + entry.legs:
                    local = leg - pos
                    break
                pos += entry.legs
            else:
                raise AssertionError("leg not located")
            if entry.legs == 1:
                c = counit_scalar(entry)
                if c:
                    out.append((coeff * c, entries[:i] + entries[i + 1 :]))
            else:
                collapsed = expr_counit_leg(entry, local)
                out.append((coeff, entries[:i] + (collapsed,) + entries[i + 1 :]))
        return TensorPoly(self.legs - 1, out)

    def permute_legs(self, perm: Sequence[int]) -> "TensorPoly":
        perm = tuple(perm)
        if sorted(perm) != list(range(1, self.legs + 1)):
            raise ValueError(f"{perm} is not a permutation of 1..{self.legs}")
        out: List[Term] = []
        for coeff, entries in self.terms:
            if any(e.legs != 1 for e in entries):
                raise ValueError("leg permutation requires single-leg entries")
            out.append((coeff, tuple(entries[p - 1] for p in perm)))
        return TensorPoly(self.legs, out)

    def embed(self, positions: Sequence[int], total: int) -> "TensorPoly":
        """Place legs at the given (increasing) positions, identity elsewhere."""
        positions = tuple(positions)
        if len(positions) != self.legs or list(positions) != sorted(set(positions)):
            raise ValueError("positions must be strictly increasing, one per leg")
        out: List[Term] = []
        for coeff, entries in self.terms:
            slots: List[Expr] = [ONE] * total
            pos = 0
            for entry in entries:
                span = [positions[pos + k] - 1 for k in range(entry.legs)]
                if entry.legs > 1 and span != list(range(span[0], span[0] + entry.legs)):
                    raise ValueError("embedding would split a fused multi-leg factor")
                slots[span[0]] = entry
                for extra in span[1:]:
                    slots[extra] = None  # covered by the fused entry
                pos += entry.legs
            out.append((coeff, tuple(s for s in slots if s is not None)))
        return TensorPoly(total, out)

    # -- serialization ------------------------------------------------------

    def to_json(self):
        terms = [
            {"coeff": str(coeff), "entries": [expr_to_json(e) for e in entries]}
            for coeff, entries in self.terms
        ]
        terms.sort(key=lambda t: json.dumps(t, sort_keys=True))
        return {"legs": self.legs, "terms": terms}

    @staticmethod
    def from_json(data) -> "TensorPoly":
        terms = [
            (parse_scalar(t["coeff"]), tuple(expr_from_json(e) for e in t["entries"]))
            for t in data["terms"]
        ]
        return TensorPoly(data["legs"], terms)


def split_coproduct(e: Expr):
    """Expand the primitive coproduct of a single-leg expression into
    elementary tensors, or return None when no finite expansion exists
    (analytic nodes with generator-dependent arguments)."""
    if e is ONE:
        return [(S_ONE, ONE, ONE)]
    if isinstance(e, GenExpr):
        return [(S_ONE, e, ONE), (S_ONE, ONE, e)]
    if isinstance(e, ScalarMulExpr):
        inner = split_coproduct(e.arg)
        if inner is None:
            return None
        return [(e.coeff * c, a, b) for c, a, b in inner]
    if isinstance(e, SumExpr):
        out = []
        for part in e.args:
            inner = split_coproduct(part)
            if inner is None:
                return None
            out.extend(inner)
        return out
    if isinstance(e, ProdExpr):
        out = [(S_ONE, ONE, ONE)]
        for part in e.args:
            inner = split_coproduct(part)
            if inner is None:
                return None
            out = [
                (c1 * c2, eprod(a1, a2), eprod(b1, b2))
                for c1, a1, b1 in out
                for c2, a2, b2 in inner
            ]
        return out
    if is_zero(e):
        return []
    return None


class TwistElement:
    """Ordered product of exponential factors exp(P_i) with P_i nilpotent
    in every representation used.  ``factors[0]`` is leftmost: the full
    element is exp(P_0) exp(P_1) ... exp(P_k), i.e. the rightmost factor
    is the first twist applied."""

    __slots__ = ("legs", "factors")

    def __init__(self, legs: int, factors: Iterable[TensorPoly] = ()):
        factors = tuple(factors)
        for f in factors:
            if f.legs != legs:
                raise ValueError("factor leg count mismatch")
        object.__setattr__(self, "legs", legs)
        object.__setattr__(self, "factors", factors)

    def __setattr__(self, name, value):
        raise AttributeError("TwistElement is immutable")

    @staticmethod
    def identity(legs: int = 2) -> "TwistElement":
        return TwistElement(legs)

    def __eq__(self, other):
        if not isinstance(other, TwistElement):
            return NotImplemented
        return self.legs == other.legs and self.factors == other.factors

    def __hash__(self):
        return hash((self.legs, self.factors))

    def __repr__(self):
        return f"TwistElement(legs={self.legs}, factors={len(self.factors)})"

    def eval(self, reps) -> ExactMatrix:
        if isinstance(reps, Representation):
            reps = (reps,) * self.legs
        dim = 1
        for r in reps:
            dim *= r.dim
        out = ExactMatrix.identity(dim)
        for f in self.factors:
            out = mat_mul(out, mat_exp_nilpotent(f.eval(reps)))
        return out

    def inverse(self) -> "TwistElement":
        return TwistElement(self.legs, tuple(-f for f in reversed(self.factors)))

    def compose(self, other: "TwistElement") -> "TwistElement":
        """Product self * other (other is applied first)."""
        if self.legs != other.legs:
            raise ValueError("leg count mismatch")
        return TwistElement(self.legs, self.factors + other.factors)

    def coproduct_leg(self, leg: int) -> "TwistElement":
        return TwistElement(self.legs + 1, tuple(f.coproduct_leg(leg) for f in self.factors))

    def counit_leg(self, leg: int) -> "TwistElement":
        return TwistElement(self.legs - 1, tuple(f.counit_leg(leg) for f in self.factors))

    def permute_legs(self, perm: Sequence[int]) -> "TwistElement":
        return TwistElement(self.legs, tuple(f.permute_legs(perm) for f in self.factors))

    def embed(self, positions: Sequence[int], total: int) -> "TwistElement":
        return TwistElement(total, tuple(f.embed(positions, total) for f in self.factors))

    def to_json(self):
        return {
            "legs": self.legs,
            "factors": [{"kind": "exp", "arg": f.to_json()} for f in self.factors],
        }

    @staticmethod
    def from_json(data) -> "TwistElement":
        factors = [TensorPoly.from_json(f["arg"]) for f in data["factors"]]
        return TwistElement(data["legs"], factors)
