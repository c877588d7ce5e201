"""Classical Lie algebras in exact defining representations.

Series A, B, C, D are built with root-indexed generator tables:

* A (sl(N)): the standard matrix-unit basis, roots e_i - e_j.
* B/D (so(2M+1), so(2M)): combinations of antisymmetric matrix units
  M_{ik} = e_i e_k^T - e_k e_i^T with index blocks (2a-1, 2a) per e_a and,
  for B, the last index carrying the short roots.  The combination
  pattern is pinned by requiring the chain-normalized brackets to hold
  (a build-time assertion, not an assumption).
* C (sp(2N)): the standard symplectic-form-preserving basis, ordered so
  rows 1..N carry weights +e_i and rows N+1..2N carry -e_i.

Cartan duals are H_lambda = (sum_a lambda_a h_a) / <lambda, lambda>, which
gives the 1/2-weights required by the chain normalization.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Sequence, Tuple

from gmpy2 import mpq

from .matrices import ExactMatrix, commutator, expand_in_span
from .reps import Representation
from .scalars import Scalar

Root = Tuple[int, ...]


def root_add(a: Root, b: Root) -> Root:
    return tuple(x + y for x, y in zip(a, b))


def root_sub(a: Root, b: Root) -> Root:
    return tuple(x - y for x, y in zip(a, b))


def root_neg(a: Root) -> Root:
    return tuple(-x for x in a)


def root_dot(a: Root, b: Root) -> int:
    return sum(x * y for x, y in zip(a, b))


def root_support(a: Root) -> Tuple[int, ...]:
    """1-based e-indices with nonzero coordinate."""
    return tuple(i for i, v in enumerate(a, start=1) if v)


def root_label(root: Root) -> str:
    """Readable label: (1,-1,0) -> "1-2", (0,1,1) -> "2+3", (2,0) -> "1+1"."""
    positives: List[int] = []
    negatives: List[int] = []
    for idx, v in enumerate(root, start=1):
        for _ in range(abs(v)):
            (positives if v > 0 else negatives).append(idx)
    parts = [f"+{i}" for i in positives] + [f"-{i}" for i in negatives]
    if not parts:
        return "0"
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text


def gen_gid(root: Root) -> str:
    return f"E_{{{root_label(root)}}}"


def cartan_gid(root: Root) -> str:
    return f"H_{{{root_label(root)}}}"


# ---------------------------------------------------------------------------
# Root systems
# ---------------------------------------------------------------------------


def root_system(series: str, rank: int) -> Tuple[int, frozenset]:
    """Return (number of e-coordinates, roots) for the series."""
    if rank < 1:
        raise ValueError("rank must be positive")
    roots = set()
    if series == "A":
        n = rank + 1
        for i, j in itertools.permutations(range(n), 2):
            r = [0] * n
            r[i], r[j] = 1, -1
            roots.add(tuple(r))
        return n, frozenset(roots)
    if series in ("B", "D"):
        n = rank
        for i, j in itertools.combinations(range(n), 2):
            for si in (1, -1):
                for sj in (1, -1):
                    r = [0] * n
                    r[i], r[j] = si, sj
                    roots.add(tuple(r))
        if series == "B":
            for i in range(n):
                for s in (1, -1):
                    r = [0] * n
                    r[i] = s
                    roots.add(tuple(r))
        return n, frozenset(roots)
    if series == "C":
        n = rank
        for i, j in itertools.permutations(range(n), 2):
            r = [0] * n
            r[i], r[j] = 1, -1
            roots.add(tuple(r))
        for i, j in itertools.combinations_with_replacement(range(n), 2):
            for s in (1, -1):
                r = [0] * n
                r[i] += s
                r[j] += s
                roots.add(tuple(r))
        return n, frozenset(roots)
    raise ValueError(f"unsupported series {series!r}")


def validate_root(series: str, rank: int, root: Root) -> bool:
    _, roots = root_system(series, rank)
    return tuple(root) in roots


# ---------------------------------------------------------------------------
# Generator images
# ---------------------------------------------------------------------------


def _skew(dim: int, u: Dict[int, Scalar], v: Dict[int, Scalar]) -> ExactMatrix:
    """u v^T - v u^T for sparse index->coefficient vectors."""
    entries: Dict[Tuple[int, int], Scalar] = {}
    for i, ui in u.items():
        for j, vj in v.items():
            p = ui * vj
            entries[(i, j)] = entries.get((i, j), Scalar(0)) + p
            entries[(j, i)] = entries.get((j, i), Scalar(0)) - p
    return ExactMatrix(dim, entries)


MINUS_I = Scalar(0, -1)


def _so_images(rank: int, odd: bool) -> Tuple[int, Dict[Root, ExactMatrix], Dict[int, ExactMatrix]]:
    dim = 2 * rank + (1 if odd else 0)

    def weight_vector(a: int, s: int) -> Dict[int, Scalar]:
        # e_{2a-1} + s*i*e_{2a}, 0-based matrix indices.
        return {2 * a - 2: Scalar(1), 2 * a - 1: Scalar(0, s)}

    images: Dict[Root, ExactMatrix] = {}
    n = rank
    for a, b in itertools.combinations(range(1, n + 1), 2):
        for sa in (1, -1):
            for sb in (1, -1):
                root = tuple(
                    (sa if k == a else sb if k == b else 0) for k in range(1, n + 1)
                )
                mat = _skew(dim, weight_vector(a, sa), weight_vector(b, sb))
                images[root] = mat.scale(Scalar(sb))
    if odd:
        z = {dim - 1: Scalar(1)}
        for a in range(1, n + 1):
            for s in (1, -1):
                root = tuple((s if k == a else 0) for k in range(1, n + 1))
                images[root] = _skew(dim, weight_vector(a, s), z).scale(MINUS_I)
    cartans = {
        a: _skew(dim, {2 * a - 2: Scalar(1)}, {2 * a - 1: Scalar(1)}).scale(MINUS_I)
        for a in range(1, n + 1)
    }
    return dim, images, cartans


def _sl_images(rank: int) -> Tuple[int, Dict[Root, ExactMatrix], Dict[int, ExactMatrix]]:
    n = rank + 1
    images: Dict[Root, ExactMatrix] = {}
    for i, j in itertools.permutations(range(1, n + 1), 2):
        root = tuple((1 if k == i else -1 if k == j else 0) for k in range(1, n + 1))
        images[root] = ExactMatrix.unit(n, i - 1, j - 1)
    cartans = {i: ExactMatrix.unit(n, i - 1, i - 1) for i in range(1, n + 1)}
    return n, images, cartans


def _sp_images(rank: int) -> Tuple[int, Dict[Root, ExactMatrix], Dict[int, ExactMatrix]]:
    n = rank
    dim = 2 * n
    e = ExactMatrix.unit
    images: Dict[Root, ExactMatrix] = {}
    for i, j in itertools.permutations(range(1, n + 1), 2):
        root = tuple((1 if k == i else -1 if k == j else 0) for k in range(1, n + 1))
        images[root] = e(dim, i - 1, j - 1) - e(dim, n + j - 1, n + i - 1)
    for i, j in itertools.combinations_with_replacement(range(1, n + 1), 2):
        plus = tuple(((k == i) + (k == j)) for k in range(1, n + 1))
        if i == j:
            images[plus] = e(dim, i - 1, n + i - 1)
            images[root_neg(plus)] = e(dim, n + i - 1, i - 1)
        else:
            images[plus] = e(dim, i - 1, n + j - 1) + e(dim, j - 1, n + i - 1)
            images[root_neg(plus)] = e(dim, n + i - 1, j - 1) + e(dim, n + j - 1, i - 1)
    cartans = {
        i: e(dim, i - 1, i - 1) - e(dim, n + i - 1, n + i - 1) for i in range(1, n + 1)
    }
    return dim, images, cartans


class ClassicalAlgebra:
    """A classical Lie algebra with a root-indexed generator table and an
    exact defining representation."""

    def __init__(self, series: str, rank: int):
        series = series.upper()
        if series == "A":
            if rank < 1:
                raise ValueError("A-series rank must be >= 1")
            dim, images, cartans = _sl_images(rank)
        elif series == "B":
            if rank < 1:
                raise ValueError("B-series rank must be >= 1")
            dim, images, cartans = _so_images(rank, odd=True)
        elif series == "D":
            if rank < 2:
                raise ValueError("D-series rank must be >= 2")
            dim, images, cartans = _so_images(rank, odd=False)
        elif series == "C":
            if rank < 1:
                raise ValueError("C-series rank must be >= 1")
            dim, images, cartans = _sp_images(rank)
        else:
            raise ValueError(f"unsupported series {series!r}")

        self.series = series
        self.rank = rank
        self.dim = dim
        self.n_coords, self.roots = root_system(series, rank)
        self._cartan_basis = cartans

        table: Dict[str, ExactMatrix] = {}
        self._gen_ids: Dict[Root, str] = {}
        self._cartan_ids: Dict[Root, str] = {}
        for root, mat in images.items():
            gid = gen_gid(root)
            table[gid] = mat
            self._gen_ids[root] = gid
        for root in self.roots:
            hid = cartan_gid(root)
            norm = root_dot(root, root)
            h = ExactMatrix.zero(dim)
            for a, coord in enumerate(root, start=1):
                if coord:
                    h = h + cartans[a].scale(Scalar(mpq(coord, norm)))
            table[hid] = h
            self._cartan_ids[root] = hid
        self.rep = Representation("defining", dim, table)

    # -- lookup ------------------------------------------------------------

    def is_root(self, root: Root) -> bool:
        return tuple(root) in self.roots

    def gen_id(self, root: Root) -> str:
        try:
            return self._gen_ids[tuple(root)]
        except KeyError:
            raise KeyError(f"{root} is not a root of {self.descriptor()}") from None

    def cartan_id(self, root: Root) -> str:
        try:
            return self._cartan_ids[tuple(root)]
        except KeyError:
            raise KeyError(f"{root} is not a root of {self.descriptor()}") from None

    def image(self, gid: str) -> ExactMatrix:
        return self.rep.image(gid)

    def cartan_element(self, a: int) -> ExactMatrix:
        """The e-basis Cartan generator h_a with [h_a, E_mu] = mu_a E_mu."""
        return self._cartan_basis[a]

    def descriptor(self) -> dict:
        basis = {
            "A": "matrix-units",
            "B": "okubo-blocks",
            "C": "symplectic-standard",
            "D": "okubo-blocks",
        }[self.series]
        return {"series": self.series, "rank": self.rank, "basis": basis}

    def name(self) -> str:
        if self.series == "A":
            return f"sl({self.rank + 1})"
        if self.series == "B":
            return f"so({2 * self.rank + 1})"
        if self.series == "C":
            return f"sp({2 * self.rank})"
        return f"so({2 * self.rank})"

    def __repr__(self):
        return f"ClassicalAlgebra({self.name()})"

    # -- residual subalgebras -----------------------------------------------

    def residual_basis(self, used_indices: Sequence[int], sl_only: bool = False) -> List[ExactMatrix]:
        """Matrices spanning the subalgebra on e-indices not in ``used_indices``.

        For B/D this is the full orthogonal algebra on the untouched matrix
        indices; for A the matrix-unit sl basis; for C either the symplectic
        basis or, with ``sl_only``, just the sl-type part (the invariance
        algebra of the separately invariant extension halves).
        """
        used = set(used_indices)
        free = [a for a in range(1, self.n_coords + 1) if a not in used]
        out: List[ExactMatrix] = []
        if self.series == "A":
            for i, j in itertools.permutations(free, 2):
                out.append(ExactMatrix.unit(self.dim, i - 1, j - 1))
            for i, j in zip(free, free[1:]):
                out.append(
                    ExactMatrix.unit(self.dim, i - 1, i - 1)
                    - ExactMatrix.unit(self.dim, j - 1, j - 1)
                )
            return out
        if self.series in ("B", "D"):
            idx = []
            for a in free:
                idx.extend([2 * a - 2, 2 * a - 1])
            if self.series == "B":
                idx.append(self.dim - 1)
            for p, q in itertools.combinations(idx, 2):
                out.append(
                    ExactMatrix.unit(self.dim, p, q) - ExactMatrix.unit(self.dim, q, p)
                )
            return out
        # C series
        for root in self.roots:
            if set(root_support(root)) <= set(free):
                if sl_only and sum(root) != 0:
                    continue
                out.append(self.image(self._gen_ids[root]))
        for i, j in zip(free, free[1:]):
            out.append(self._cartan_basis[i] - self._cartan_basis[j])
        if not sl_only:
            for a in free:
                out.append(self._cartan_basis[a])
        return out


# ---------------------------------------------------------------------------
# The 4-dimensional solvable carrier in its faithful 3x3 representation
# ---------------------------------------------------------------------------


class SolvableCarrier:
    """Generators A, B, E, H with [H,A] = alpha A, [H,B] = beta B,
    [A,B] = E, [H,E] = E, [E,A] = [E,B] = 0 and alpha + beta = 1,
    realized faithfully by 3x3 matrices."""

    def __init__(self, alpha):
        alpha = mpq(alpha)
        self.alpha = alpha
        self.beta = 1 - alpha
        e = ExactMatrix.unit
        images = {
            "A": e(3, 0, 1),
            "B": e(3, 1, 2),
            "E": e(3, 0, 2),
            "H": ExactMatrix(
                3, {(0, 0): Scalar(alpha), (2, 2): Scalar(alpha - 1)}
            ),
        }
        self.rep = Representation("defining", 3, images)

    def check_relations(self) -> List[str]:
        rep = self.rep
        a, b, e, h = (rep.image(g) for g in "ABEH")
        failures = []
        checks = [
            ("[H,E] = E", commutator(h, e) - e),
            ("[H,A] = alpha A", commutator(h, a) - a.scale(Scalar(self.alpha))),
            ("[H,B] = beta B", commutator(h, b) - b.scale(Scalar(self.beta))),
            ("[A,B] = E", commutator(a, b) - e),
            ("[E,A] = 0", commutator(e, a)),
            ("[E,B] = 0", commutator(e, b)),
        ]
        for label, residual in checks:
            if not residual.is_zero():
                failures.append(label)
        return failures

    def is_faithful(self) -> bool:
        basis = [self.rep.image(g) for g in "ABEH"]
        return matrix_rank_of_span(basis) == 4


def build_L_alpha_beta(alpha) -> SolvableCarrier:
    carrier = SolvableCarrier(alpha)
    failures = carrier.check_relations()
    if failures:
        raise AssertionError(f"solvable carrier relations failed: {failures}")
    return carrier


# ---------------------------------------------------------------------------
# Linear-algebra helpers over the generator span
# ---------------------------------------------------------------------------


def matrix_rank_of_span(mats: Sequence[ExactMatrix]) -> int:
    """Rank of the span of the given matrices, by exact elimination."""
    positions = sorted({k for m in mats for k in m.entries})
    rows = [[m.entries.get(pos, Scalar(0)) for pos in positions] for m in mats]
    rank = 0
    col = 0
    nrows = len(rows)
    ncols = len(positions)
    while rank < nrows and col < ncols:
        pivot = None
        for r in range(rank, nrows):
            if rows[r][col].body():
                pivot = r
                break
        if pivot is None:
            col += 1
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = rows[rank][col].inverse()
        rows[rank] = [inv * v for v in rows[rank]]
        for r in range(nrows):
            if r != rank and rows[r][col]:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
        col += 1
    return rank


def proportionality(a: ExactMatrix, b: ExactMatrix) -> Optional[Scalar]:
    """Scalar k with a = k*b, or None."""
    if b.is_zero():
        return Scalar(0) if a.is_zero() else None
    if a.is_zero():
        return Scalar(0)
    (pos, vb) = next(iter(sorted(b.entries.items())))
    va = a.entries.get(pos)
    if va is None:
        return None
    k = va * vb.inverse()
    return k if a == b.scale(k) else None


def build_adjoint(basis_gids: Sequence[str], rep: Representation, name: str = "adjoint"):
    """Adjoint representation of the span of ``basis_gids``.

    Returns (Representation, center_dimension).  Raises if the span is not
    closed under commutators.
    """
    basis = [rep.image(g) for g in basis_gids]
    n = len(basis)
    images: Dict[str, ExactMatrix] = {}
    ad_mats: List[ExactMatrix] = []
    for gi, g in enumerate(basis_gids):
        entries: Dict[Tuple[int, int], Scalar] = {}
        gm = basis[gi]
        for j in range(n):
            coeffs = expand_in_span(commutator(gm, basis[j]), basis)
            if coeffs is None:
                raise ValueError(
                    f"span of {list(basis_gids)} is not closed: [{g}, {basis_gids[j]}]"
                )
            for i, c in enumerate(coeffs):
                if c:
                    entries[(i, j)] = c
        mat = ExactMatrix(n, entries)
        images[g] = mat
        ad_mats.append(mat)
    center_dim = n - matrix_rank_of_span_stacked(ad_mats, n)
    return Representation(name, n, images), center_dim


def matrix_rank_of_span_stacked(ad_mats: Sequence[ExactMatrix], n: int) -> int:
    """Rank of c -> sum_i c_i ad_i, i.e. n minus the center dimension."""
    # Treat each ad matrix as a long vector; the rank of their span equals
    # the rank of the linear map from coefficients to ad images.
    return matrix_rank_of_span(ad_mats)
