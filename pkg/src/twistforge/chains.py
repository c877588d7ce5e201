"""Chains of extended Jordanian twists over classical Lie algebras.

A chain is an ordered composition of per-level twists.  Each level sits
on an initial root lambda0 whose raising generator E plays the Jordanian
role; the constituent pairs (lambda', lambda0 - lambda') feed the
extension factor

    Phi_E = exp( sum_{lambda' in theta} c xi L' (x) L'' (1 + xi E)^(-1/2) ),
    Phi_J = exp( H (x) log(1 + xi E) ),

with the coefficient c fixed per pair so that c [L', L''] = E in the
generator table.  Factors are stored in product order: the level-0
factors are rightmost, i.e. applied first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .algebras import (
    ClassicalAlgebra,
    Root,
    proportionality,
    root_add,
    root_sub,
    root_support,
)
from .expr import Expr, ONE, esum, gen, log1p, eprod, pow_rat, smul
from .matrices import commutator
from .scalars import ONE as S_ONE
from .scalars import Scalar, parse_scalar
from .tensors import TensorPoly, TwistElement


class ChainConstructionError(ValueError):
    pass


class InvalidSpecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Chain specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Level:
    initial_root: Root
    theta: Optional[Tuple[Root, ...]] = None  # None means the full primed set
    xi: Scalar = S_ONE


@dataclass(frozen=True)
class ChainSpec:
    series: str
    rank: int
    levels: Tuple[Level, ...]
    improper: bool = False

    def descriptor(self) -> dict:
        return {"series": self.series, "rank": self.rank}

    def to_json(self) -> dict:
        levels = []
        for lev in self.levels:
            levels.append(
                {
                    "initial_root": list(lev.initial_root),
                    "theta": "all" if lev.theta is None else [list(r) for r in lev.theta],
                    "xi": str(lev.xi),
                }
            )
        return {
            "algebra": {"series": self.series, "rank": self.rank},
            "levels": levels,
            "improper": self.improper,
        }

    @staticmethod
    def from_json(data: dict) -> "ChainSpec":
        try:
            alg = data["algebra"]
            series = str(alg["series"]).upper()
            if series not in ("A", "B", "C", "D"):
                raise InvalidSpecError(f"unsupported series {series!r}")
            rank = int(alg["rank"])
            levels = []
            for lev in data.get("levels", []):
                theta = lev.get("theta", "all")
                theta_t = None if theta == "all" else tuple(tuple(int(c) for c in r) for r in theta)
                xi = parse_scalar(str(lev.get("xi", "1")))
                levels.append(Level(tuple(int(c) for c in lev["initial_root"]), theta_t, xi))
            return ChainSpec(series, rank, tuple(levels), bool(data.get("improper", False)))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpecError(f"malformed chain spec: {exc}") from exc


# ---------------------------------------------------------------------------
# Initial roots and constituent pairs
# ---------------------------------------------------------------------------


def initial_roots(series: str, rank: int, include_sl2_tail: bool = True) -> List[Root]:
    """The default ladder of initial roots for the series.

    A uses e1-e2, e3-e4, ...; B and D use e1+e2, e3+e4, ...  The ladder
    stops when the residual subalgebra has no admissible root.  For A the
    trailing pure-Jordanian sl(2) level (when N is even) is included only
    with ``include_sl2_tail``.
    """
    series = series.upper()
    out: List[Root] = []
    if series == "A":
        n = rank + 1
        k = 0
        while 2 * k + 2 <= n:
            a, b = 2 * k + 1, 2 * k + 2
            root = tuple(1 if i == a else -1 if i == b else 0 for i in range(1, n + 1))
            if b + 1 <= n:
                out.append(root)
            elif include_sl2_tail:
                out.append(root)
            k += 1
        return out
    if series in ("B", "D"):
        k = 0
        while 2 * k + 2 <= rank:
            a, b = 2 * k + 1, 2 * k + 2
            out.append(tuple(1 if i in (a, b) else 0 for i in range(1, rank + 1)))
            k += 1
        return out
    raise ValueError(
        f"series {series!r} has no proper chain ladder; use build_improper_sp for C"
    )


def constituent_pairs(
    alg: ClassicalAlgebra, lam0: Root, excluded_indices: Sequence[int] = ()
) -> List[Tuple[Root, Root]]:
    """Ordered pairs (lambda', lambda'') with lambda' + lambda'' = lambda0,
    neither of which stays a root after adding lambda0 again.

    The pairs are computed inside the subalgebra on the e-indices not in
    ``excluded_indices``: at chain level k these are the indices untouched
    by earlier initial roots, so the constituents always lie in the
    residual subalgebra whose generators the preceding levels leave
    primitive.

    The primed member is the one with the larger coordinate on the pivot
    (first support) index of lambda0; exact ties are broken towards the
    lexicographically smaller root.  Pairs are sorted lexicographically
    by the primed root, fixing a deterministic factor order.
    """
    lam0 = tuple(lam0)
    if not alg.is_root(lam0):
        raise KeyError(f"{lam0} is not a root of {alg.name()}")
    excluded = set(excluded_indices)
    if excluded & set(root_support(lam0)):
        raise InvalidSpecError(
            f"initial root {lam0} touches excluded e-indices {sorted(excluded)}"
        )
    pivot = root_support(lam0)[0] - 1
    seen = set()
    pairs: List[Tuple[Root, Root]] = []
    for mu in alg.roots:
        if excluded & set(root_support(mu)):
            continue
        nu = root_sub(lam0, mu)
        if nu == mu or not alg.is_root(nu):
            continue
        key = frozenset((mu, nu))
        if key in seen:
            continue
        seen.add(key)
        if alg.is_root(root_add(mu, lam0)) or alg.is_root(root_add(nu, lam0)):
            continue
        if mu[pivot] > nu[pivot] or (mu[pivot] == nu[pivot] and mu < nu):
            pairs.append((mu, nu))
        else:
            pairs.append((nu, mu))
    pairs.sort(key=lambda p: p[0])
    return pairs


# ---------------------------------------------------------------------------
# Carrier levels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CarrierLevel:
    initial_root: Root
    h_id: str
    e_id: str
    pairs: Tuple[Tuple[str, str, Scalar], ...]  # (primed gid, counterpart gid, c)
    pair_roots: Tuple[Tuple[Root, Root], ...]
    xi: Scalar


def build_carrier_level(
    alg: ClassicalAlgebra, level: Level, excluded_indices: Sequence[int] = ()
) -> CarrierLevel:
    lam0 = tuple(level.initial_root)
    all_pairs = constituent_pairs(alg, lam0, excluded_indices)
    if level.theta is None:
        chosen = all_pairs
    else:
        theta = [tuple(r) for r in level.theta]
        primed = {p[0]: p for p in all_pairs}
        missing = [r for r in theta if r not in primed]
        if missing:
            raise InvalidSpecError(
                f"theta roots {missing} are not primed constituents of {lam0}"
            )
        chosen = [primed[r] for r in theta]
        chosen.sort(key=lambda p: p[0])
    e_img = alg.image(alg.gen_id(lam0))
    triples = []
    for mu, nu in chosen:
        bracket = commutator(alg.image(alg.gen_id(mu)), alg.image(alg.gen_id(nu)))
        k = proportionality(bracket, e_img)
        if k is None or not k:
            raise ChainConstructionError(
                f"[{alg.gen_id(mu)}, {alg.gen_id(nu)}] is not a nonzero multiple of {alg.gen_id(lam0)}"
            )
        triples.append((alg.gen_id(mu), alg.gen_id(nu), k.inverse()))
    return CarrierLevel(
        initial_root=lam0,
        h_id=alg.cartan_id(lam0),
        e_id=alg.gen_id(lam0),
        pairs=tuple(triples),
        pair_roots=tuple(chosen),
        xi=level.xi,
    )


def sigma_expr(carrier: CarrierLevel) -> Expr:
    """log(1 + xi E) for the level."""
    return log1p(smul(carrier.xi, gen(carrier.e_id)))


def damping_expr(carrier: CarrierLevel, exponent=mpq(-1, 2)) -> Expr:
    """(1 + xi E)^exponent, i.e. exp(exponent * sigma)."""
    return pow_rat(esum(ONE, smul(carrier.xi, gen(carrier.e_id))), exponent)


def jordanian_poly(carrier: CarrierLevel) -> TensorPoly:
    return TensorPoly.single(S_ONE, gen(carrier.h_id), sigma_expr(carrier))


def extension_poly(carrier: CarrierLevel) -> TensorPoly:
    damp = damping_expr(carrier)
    poly = TensorPoly.zero(2)
    for primed, counterpart, coeff in carrier.pairs:
        poly = poly + TensorPoly.single(
            coeff * carrier.xi, gen(primed), eprod(gen(counterpart), damp)
        )
    return poly


def extension_polys_split(carrier: CarrierLevel) -> List[TensorPoly]:
    damp = damping_expr(carrier)
    return [
        TensorPoly.single(coeff * carrier.xi, gen(primed), eprod(gen(counterpart), damp))
        for primed, counterpart, coeff in carrier.pairs
    ]


def build_level_twist(
    alg: ClassicalAlgebra,
    level: Level,
    split: bool = False,
    excluded_indices: Sequence[int] = (),
) -> TwistElement:
    """The level twist Phi_E Phi_J as a two-leg element.

    With ``split`` the extension is one factor per constituent pair instead
    of a single exponential of the sum; the two agree because the summands
    commute, which the verification suite checks rather than assumes.
    """
    carrier = build_carrier_level(alg, level, excluded_indices)
    factors: List[TensorPoly] = []
    if carrier.pairs:
        if split:
            factors.extend(extension_polys_split(carrier))
        else:
            factors.append(extension_poly(carrier))
    factors.append(jordanian_poly(carrier))
    return TwistElement(2, factors)


# ---------------------------------------------------------------------------
# Whole chains
# ---------------------------------------------------------------------------


def validate_spec(alg: ClassicalAlgebra, spec: ChainSpec) -> None:
    if spec.series != alg.series or spec.rank != alg.rank:
        raise InvalidSpecError("spec does not match the algebra descriptor")
    used: set = set()
    for lev in spec.levels:
        root = tuple(lev.initial_root)
        if len(root) != alg.n_coords:
            raise InvalidSpecError(
                f"initial root {root} has {len(root)} coordinates, expected {alg.n_coords}"
            )
        if not alg.is_root(root):
            raise InvalidSpecError(f"{root} is not a root of {alg.name()}")
        support = set(root_support(root))
        if used & support:
            raise InvalidSpecError(
                f"initial root {root} reuses e-indices {sorted(used & support)} "
                "taken by earlier levels"
            )
        used |= support


def chain_carriers(alg: ClassicalAlgebra, spec: ChainSpec) -> List[CarrierLevel]:
    """Carrier data per level, with constituents restricted to the residual
    subalgebra left by the preceding levels."""
    out: List[CarrierLevel] = []
    used: set = set()
    for level in spec.levels:
        out.append(build_carrier_level(alg, level, excluded_indices=sorted(used)))
        used |= set(root_support(level.initial_root))
    return out


def build_chain(alg: ClassicalAlgebra, spec: ChainSpec, split: bool = False) -> TwistElement:
    """The chain twist, factors ordered so level-0 factors are applied first."""
    validate_spec(alg, spec)
    violations = structure_check(alg, spec)
    if violations:
        raise ChainConstructionError(
            "chain carrier fails the normalization relations: " + "; ".join(violations)
        )
    factors: List[TensorPoly] = []
    for carrier in reversed(chain_carriers(alg, spec)):
        if carrier.pairs:
            if split:
                factors.extend(extension_polys_split(carrier))
            else:
                factors.append(extension_poly(carrier))
        factors.append(jordanian_poly(carrier))
    return TwistElement(2, factors)


def structure_check(alg: ClassicalAlgebra, spec: ChainSpec) -> List[str]:
    """Verify the chain-normalized bracket relations for every level.

    Returns a list of human-readable violations; empty means pass.
    Checked per level: [H, L'] = L'/2, [H, L''] = L''/2, c[L', L''] = E,
    [E, L'] = [E, L''] = 0, [H, E] = E, and mutual commutativity of all
    constituent generators except counterpart pairs.
    """
    half = Scalar(mpq(1, 2))
    out: List[str] = []
    used: set = set()
    for idx, level in enumerate(spec.levels):
        try:
            carrier = build_carrier_level(alg, level, excluded_indices=sorted(used))
        except (ChainConstructionError, InvalidSpecError, KeyError) as exc:
            out.append(f"level {idx}: {exc}")
            continue
        finally:
            used |= set(root_support(level.initial_root))
        h = alg.image(carrier.h_id)
        e = alg.image(carrier.e_id)
        lam0 = carrier.initial_root
        if commutator(h, e) != e:
            out.append(f"level {idx}: [{carrier.h_id}, {carrier.e_id}] != {carrier.e_id}")
        members: List[Tuple[Root, str]] = []
        for (mu, nu), (gid_mu, gid_nu, coeff) in zip(carrier.pair_roots, carrier.pairs):
            lm = alg.image(gid_mu)
            ln = alg.image(gid_nu)
            for root, gid, mat in ((mu, gid_mu, lm), (nu, gid_nu, ln)):
                if commutator(h, mat) != mat.scale(half):
                    out.append(f"level {idx}: [{carrier.h_id}, {gid}] != {gid}/2")
                if not commutator(e, mat).is_zero():
                    out.append(f"level {idx}: [{carrier.e_id}, {gid}] != 0")
                members.append((root, gid))
            if commutator(lm, ln).scale(coeff) != e:
                out.append(
                    f"level {idx}: normalized [{gid_mu}, {gid_nu}] != {carrier.e_id}"
                )
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                (mu, gid_mu), (nu, gid_nu) = members[i], members[j]
                if root_add(mu, nu) == lam0:
                    continue
                if not commutator(alg.image(gid_mu), alg.image(gid_nu)).is_zero():
                    out.append(f"level {idx}: [{gid_mu}, {gid_nu}] != 0")
    return out


# ---------------------------------------------------------------------------
# Classical r-matrices
# ---------------------------------------------------------------------------


def wedge_terms(
    alg: ClassicalAlgebra, spec: ChainSpec, etas: Optional[Sequence] = None
) -> List[Tuple[Scalar, str, str]]:
    """The wedge expansion sum_k eta_k (H_k ^ E_k + sum c L' ^ L'')."""
    if etas is None:
        etas = [1] * len(spec.levels)
    if len(etas) != len(spec.levels):
        raise InvalidSpecError("one eta multiplier per level is required")
    out: List[Tuple[Scalar, str, str]] = []
    for eta, carrier in zip(etas, chain_carriers(alg, spec)):
        eta = Scalar.of(eta if not isinstance(eta, str) else parse_scalar(eta))
        out.append((eta, carrier.h_id, carrier.e_id))
        for primed, counterpart, coeff in carrier.pairs:
            out.append((eta * coeff, primed, counterpart))
    return out


def classical_r(
    alg: ClassicalAlgebra, spec: ChainSpec, etas: Optional[Sequence] = None
) -> TensorPoly:
    """The first-order deformation term as an antisymmetric two-leg sum,
    with a ^ b meaning a (x) b - b (x) a."""
    poly = TensorPoly.zero(2)
    for coeff, left, right in wedge_terms(alg, spec, etas):
        poly = poly + TensorPoly.single(coeff, gen(left), gen(right))
        poly = poly + TensorPoly.single(-coeff, gen(right), gen(left))
    return poly


# ---------------------------------------------------------------------------
# Improper chains inside the symplectic series
# ---------------------------------------------------------------------------


def build_improper_sp(rank: int, variant: str = "short") -> ChainSpec:
    """A chain spec living inside sp(2*rank) via its sl-type subalgebra.

    variant "short": ladder e1-e2, e3-e4, ... with the extension restricted
    to the half {e_a - e_l} whose pairs close inside the sl subalgebra.
    variant "plus": same ladder with the other invariant half {e_a + e_l}.
    variant "long": first level on the long root 2e1 (all pairs), then the
    short ladder on the remaining indices.
    """
    if rank < 2:
        raise ValueError("improper chains need rank >= 2")
    if variant not in ("short", "plus", "long"):
        raise ValueError(f"unsupported improper variant {variant!r}")
    n = rank
    levels: List[Level] = []

    def short_ladder(start_index: int):
        k = start_index
        while k + 1 <= n:
            a, b = k, k + 1
            root = tuple(1 if i == a else -1 if i == b else 0 for i in range(1, n + 1))
            sign = 1 if variant == "plus" else -1
            theta = tuple(
                tuple(1 if i == a else sign if i == l else 0 for i in range(1, n + 1))
                for l in range(b + 1, n + 1)
            )
            levels.append(Level(root, theta))
            k += 2

    if variant == "long":
        lam0 = tuple(2 if i == 1 else 0 for i in range(1, n + 1))
        levels.append(Level(lam0, None))
        # Continue with the sl ladder on the untouched indices.
        k = 2
        while k + 1 <= n:
            a, b = k, k + 1
            root = tuple(1 if i == a else -1 if i == b else 0 for i in range(1, n + 1))
            theta = tuple(
                tuple(1 if i == a else -1 if i == l else 0 for i in range(1, n + 1))
                for l in range(b + 1, n + 1)
            )
            levels.append(Level(root, theta))
            k += 2
    else:
        short_ladder(1)
    return ChainSpec("C", rank, tuple(levels), improper=True)


def build_sp_counterexample(rank: int) -> TwistElement:
    """Jordanian at e1-e2 composed with an extension built on the full
    symplectic-invariant combination of both halves.  This element is
    intended to fail the twist equation; the two halves used separately
    pass."""
    if rank < 3:
        raise ValueError("the symplectic-invariant extension needs rank >= 3")
    alg = ClassicalAlgebra("C", rank)
    n = rank
    lam0 = tuple(1 if i == 1 else -1 if i == 2 else 0 for i in range(1, n + 1))
    level = Level(lam0, None)
    pairs = constituent_pairs(alg, lam0)
    carrier_all = build_carrier_level(alg, Level(lam0, tuple(p[0] for p in pairs)))
    damp = damping_expr(carrier_all)
    poly = TensorPoly.zero(2)
    for (mu, _nu), (gid_mu, gid_nu, coeff) in zip(
        carrier_all.pair_roots, carrier_all.pairs
    ):
        # The plus-half (e1 + e_l) enters with +, the minus-half (e1 - e_l)
        # with -: the relative sign of the symplectic-invariant pairing.
        sign = S_ONE if sum(mu) == 2 else -S_ONE
        poly = poly + TensorPoly.single(
            sign * coeff * carrier_all.xi, gen(gid_mu), eprod(gen(gid_nu), damp)
        )
    jor = jordanian_poly(carrier_all)
    return TwistElement(2, [poly, jor])


# ---------------------------------------------------------------------------
# Default specs and presets
# ---------------------------------------------------------------------------


def default_spec(
    series: str,
    rank: int,
    xi=None,
    include_sl2_tail: bool = True,
    improper_variant: str = "short",
) -> ChainSpec:
    series = series.upper()
    if series == "C":
        spec = build_improper_sp(rank, improper_variant)
        if xi is not None:
            xi_s = Scalar.of(xi if not isinstance(xi, str) else parse_scalar(xi))
            spec = ChainSpec(
                spec.series,
                spec.rank,
                tuple(Level(l.initial_root, l.theta, xi_s) for l in spec.levels),
                improper=True,
            )
        return spec
    xi_s = S_ONE if xi is None else Scalar.of(xi if not isinstance(xi, str) else parse_scalar(xi))
    levels = tuple(
        Level(root, None, xi_s) for root in initial_roots(series, rank, include_sl2_tail)
    )
    return ChainSpec(series, rank, levels)


def spec_with_etas(spec: ChainSpec, etas: Sequence) -> ChainSpec:
    """Set xi_k = eta_k * eps on every level (the semiclassical slice)."""
    from .scalars import EPS

    if len(etas) != len(spec.levels):
        raise InvalidSpecError("one eta per level is required")
    levels = []
    for eta, level in zip(etas, spec.levels):
        eta_s = Scalar.of(eta if not isinstance(eta, str) else parse_scalar(eta))
        levels.append(Level(level.initial_root, level.theta, eta_s * EPS))
    return ChainSpec(spec.series, spec.rank, tuple(levels), spec.improper)
