"""Sparse square matrices over exact scalars.

Storage is canonical sparse form: only nonzero entries are kept, and
iteration order is sorted, so equal matrices serialize identically.
All linear algebra is exact; the analytic maps (exponential, logarithm,
rational powers) are defined only for nilpotent/unipotent arguments,
where the defining series terminate.
"""

from __future__ import annotations

from typing import Dict, Iterable, Sequence, Tuple

from gmpy2 import mpq

from .scalars import ONE, Scalar, rat


class NotNilpotentError(ValueError):
    """Raised when an analytic matrix map receives a non-nilpotent argument."""


class SingularMatrixError(ValueError):
    pass


Entry = Tuple[int, int]


class ExactMatrix:
    """Immutable sparse square matrix with exact scalar entries."""

    __slots__ = ("dim", "entries", "_rows")

    def __init__(self, dim: int, entries: Dict[Entry, Scalar] | None = None):
        if dim <= 0:
            raise ValueError("matrix dimension must be positive")
        object.__setattr__(self, "dim", dim)
        clean: Dict[Entry, Scalar] = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < dim and 0 <= j < dim):
                    raise ValueError(f"index {(i, j)} out of range for dim {dim}")
                if v:
                    clean[(i, j)] = v
        object.__setattr__(self, "entries", clean)
        object.__setattr__(self, "_rows", None)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero(dim: int) -> "ExactMatrix":
        return ExactMatrix(dim)

    @staticmethod
    def identity(dim: int) -> "ExactMatrix":
        return ExactMatrix(dim, {(i, i): ONE for i in range(dim)})

    @staticmethod
    def unit(dim: int, i: int, j: int, value: Scalar = ONE) -> "ExactMatrix":
        """Matrix unit e_{ij}, optionally scaled."""
        return ExactMatrix(dim, {(i, j): value})

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "ExactMatrix":
        dim = len(rows)
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != dim:
                raise ValueError("matrix must be square")
            for j, v in enumerate(row):
                s = Scalar.of(v)
                if s:
                    entries[(i, j)] = s
        return ExactMatrix(dim, entries)

    # -- access ----------------------------------------------------------

    def get(self, i: int, j: int) -> Scalar:
        return self.entries.get((i, j), Scalar(0))

    def entries_sorted(self) -> Iterable[Tuple[Entry, Scalar]]:
        return sorted(self.entries.items())

    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def is_identity(self) -> bool:
        if len(self.entries) != self.dim:
            return False
        return all(self.entries.get((i, i)) == ONE for i in range(self.dim))

    def _row_index(self):
        rows = self._rows
        if rows is None:
            rows = {}
            for (i, j), v in self.entries.items():
                rows.setdefault(i, []).append((j, v))
            object.__setattr__(self, "_rows", rows)
        return rows

    # -- ring operations ---------------------------------------------------

    def _require_same_dim(self, other: "ExactMatrix"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._require_same_dim(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            cur = out.get(k)
            s = v if cur is None else cur + v
            if s:
                out[k] = s
            elif cur is not None:
                del out[k]
        return ExactMatrix(self.dim, out)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._require_same_dim(other)
        out = dict(self.entries)
        for k, v in other.entries.items():
            cur = out.get(k)
            s = -v if cur is None else cur - v
            if s:
                out[k] = s
            elif cur is not None:
                del out[k]
        return ExactMatrix(self.dim, out)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(self.dim, {k: -v for k, v in self.entries.items()})

    def scale(self, c) -> "ExactMatrix":
        s = Scalar.of(c)
        if not s:
            return ExactMatrix(self.dim)
        return ExactMatrix(self.dim, {k: s * v for k, v in self.entries.items()})

    def __mul__(self, other):
        if isinstance(other, ExactMatrix):
            return mat_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.dim == other.dim and self.entries == other.entries

    def __hash__(self):
        return hash((self.dim, frozenset(self.entries.items())))

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.dim, {(j, i): v for (i, j), v in self.entries.items()})

    # -- eps structure -----------------------------------------------------

    def eps_free(self) -> "ExactMatrix":
        return ExactMatrix(self.dim, {k: v.body() for k, v in self.entries.items()})

    def eps_coefficient(self) -> "ExactMatrix":
        return ExactMatrix(self.dim, {k: v.eps_part() for k, v in self.entries.items()})

    # -- misc ----------------------------------------------------------------

    def __repr__(self):
        return f"ExactMatrix(dim={self.dim}, nnz={self.nnz()})"

    def pretty(self) -> str:
        rows = []
        for i in range(self.dim):
            rows.append(" ".join(str(self.get(i, j)) for j in range(self.dim)))
        return "\n".join(rows)


def mat_mul(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Exact sparse matrix product."""
    a._require_same_dim(b)
    b_rows = b._row_index()
    acc: Dict[Entry, Scalar] = {}
    for (i, k), va in a.entries.items():
        row = b_rows.get(k)
        if not row:
            continue
        for j, vb in row:
            key = (i, j)
            prod = va * vb
            cur = acc.get(key)
            acc[key] = prod if cur is None else cur + prod
    return ExactMatrix(a.dim, {k: v for k, v in acc.items() if v})


def kron(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Kronecker product; entry ((i*db+k),(j*db+l)) = a[i,j]*b[k,l]."""
    db = b.dim
    out: Dict[Entry, Scalar] = {}
    for (i, j), va in a.entries.items():
        ri, cj = i * db, j * db
        for (k, l), vb in b.entries.items():
            out[(ri + k, cj + l)] = va * vb
    return ExactMatrix(a.dim * db, out)


def kron_all(mats: Sequence[ExactMatrix]) -> ExactMatrix:
    out = mats[0]
    for m in mats[1:]:
        out = kron(out, m)
    return out


def commutator(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    return mat_mul(a, b) - mat_mul(b, a)


def nilpotency_index(n: ExactMatrix) -> int | None:
    """Smallest m with n**m = 0, or None if n is not nilpotent.

    Established constructively by repeated squaring bounded by the
    dimension; nilpotency is never assumed.
    """
    if n.is_zero():
        return 1
    power = n
    exponent = 1
    while exponent < n.dim:
        power = mat_mul(power, power)
        exponent *= 2
        if power.is_zero():
            break
    if not power.is_zero():
        return None
    # Exact index by forward scan (cheap once nilpotency is known).
    acc = n
    m = 1
    while not acc.is_zero():
        acc = mat_mul(acc, n)
        m += 1
    return m


def mat_exp_nilpotent(n: ExactMatrix) -> ExactMatrix:
    """exp(n) for nilpotent n, as a terminating exact series."""
    idx = nilpotency_index(n)
    if idx is None:
        raise NotNilpotentError("exponential argument is not nilpotent")
    out = ExactMatrix.identity(n.dim)
    term = ExactMatrix.identity(n.dim)
    fact = mpq(1)
    for k in range(1, idx):
        term = mat_mul(term, n)
        fact = fact / k
        out = out + term.scale(Scalar(fact))
    return out


def mat_log1p_nilpotent(n: ExactMatrix) -> ExactMatrix:
    """log(1 + n) for nilpotent n; inverse of mat_exp_nilpotent up to I."""
    idx = nilpotency_index(n)
    if idx is None:
        raise NotNilpotentError("logarithm argument is not nilpotent")
    out = ExactMatrix.zero(n.dim)
    term = ExactMatrix.identity(n.dim)
    for k in range(1, idx):
        term = mat_mul(term, n)
        coeff = mpq(1, k) if k % 2 == 1 else mpq(-1, k)
        out = out + term.scale(Scalar(coeff))
    return out


def mat_pow_rational(u: ExactMatrix, q) -> ExactMatrix:
    """u**q for unipotent u (u - I nilpotent) and rational q.

    Binomial series sum_k C(q,k) (u-I)^k, terminating exactly.
    """
    q = rat(q)
    n = u - ExactMatrix.identity(u.dim)
    idx = nilpotency_index(n)
    if idx is None:
        raise NotNilpotentError("rational power base is not unipotent")
    out = ExactMatrix.identity(u.dim)
    term = ExactMatrix.identity(u.dim)
    binom = mpq(1)
    for k in range(1, idx):
        term = mat_mul(term, n)
        binom = binom * (q - (k - 1)) / k
        if binom:
            out = out + term.scale(Scalar(binom))
    return out


def mat_inverse(m: ExactMatrix) -> ExactMatrix:
    """Exact inverse by Gaussian elimination; raises if singular."""
    dim = m.dim
    work = [[m.get(i, j) for j in range(dim)] for i in range(dim)]
    inv = [[ONE if i == j else Scalar(0) for j in range(dim)] for i in range(dim)]
    for col in range(dim):
        pivot_row = None
        for r in range(col, dim):
            if work[r][col].body():
                pivot_row = r
                break
        if pivot_row is None:
            raise SingularMatrixError("matrix is not invertible")
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            inv[col], inv[pivot_row] = inv[pivot_row], inv[col]
        piv = work[col][col].inverse()
        work[col] = [piv * v for v in work[col]]
        inv[col] = [piv * v for v in inv[col]]
        for r in range(dim):
            if r == col:
                continue
            factor = work[r][col]
            if not factor:
                continue
            work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
            inv[r] = [a - factor * b for a, b in zip(inv[r], inv[col])]
    return ExactMatrix.from_rows(inv)


def swap_legs(m: ExactMatrix, d: int) -> ExactMatrix:
    """Conjugate a two-leg matrix (dim d*d) by the leg-swap permutation."""
    if m.dim != d * d:
        raise ValueError("matrix dimension is not d*d")
    out = {}
    for ((r, c), v) in m.entries.items():
        a, b = divmod(r, d)
        x, y = divmod(c, d)
        out[(b * d + a, y * d + x)] = v
    return ExactMatrix(m.dim, out)


def embed_two_leg(m: ExactMatrix, d: int, total_legs: int, positions: Tuple[int, int]) -> ExactMatrix:
    """Embed a two-leg matrix into legs ``positions`` of a d**total_legs space.

    Remaining legs carry the identity. Positions are 1-based and ordered.
    """
    p, q = positions
    if not (1 <= p < q <= total_legs):
        raise ValueError("positions must be ordered and within the leg count")
    if m.dim != d * d:
        raise ValueError("matrix dimension is not d*d")
    idle = [leg for leg in range(1, total_legs + 1) if leg not in (p, q)]
    weights = [d ** (total_legs - leg) for leg in range(1, total_legs + 1)]
    wp, wq = weights[p - 1], weights[q - 1]
    idle_w = [weights[leg - 1] for leg in idle]

    # Precompute the diagonal offsets contributed by the idle legs.
    offsets = [0]
    for w in idle_w:
        offsets = [off + digit * w for off in offsets for digit in range(d)]

    out: Dict[Entry, Scalar] = {}
    for ((r, c), v) in m.entries.items():
        a, b = divmod(r, d)
        x, y = divmod(c, d)
        base_r = a * wp + b * wq
        base_c = x * wp + y * wq
        for off in offsets:
            out[(base_r + off, base_c + off)] = v
    return ExactMatrix(d ** total_legs, out)


def expand_in_span(target: ExactMatrix, basis: Sequence[ExactMatrix]):
    """Solve target = sum_i c_i basis_i exactly; returns list of Scalars or None."""
    positions = sorted({k for b in basis for k in b.entries} | set(target.entries))
    if not positions:
        return [Scalar(0)] * len(basis)
    rows = len(positions)
    cols = len(basis)
    a = [[basis[j].entries.get(pos, Scalar(0)) for j in range(cols)] for pos in positions]
    rhs = [target.entries.get(pos, Scalar(0)) for pos in positions]
    # Gaussian elimination with exact pivots.
    pivot_cols = []
    row = 0
    for col in range(cols):
        pivot = None
        for r in range(row, rows):
            if a[r][col].body():
                pivot = r
                break
        if pivot is None:
            continue
        a[row], a[pivot] = a[pivot], a[row]
        rhs[row], rhs[pivot] = rhs[pivot], rhs[row]
        inv = a[row][col].inverse()
        a[row] = [inv * v for v in a[row]]
        rhs[row] = inv * rhs[row]
        for r in range(rows):
            if r != row and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
                rhs[r] = rhs[r] - f * rhs[row]
        pivot_cols.append(col)
        row += 1
        if row == rows:
            break
    coeffs = [Scalar(0)] * cols
    for r, col in enumerate(pivot_cols):
        coeffs[col] = rhs[r]
    # Consistency: rows beyond the pivots must have zero rhs, and the
    # combination must reproduce the target exactly.
    for r in range(len(pivot_cols), rows):
        if rhs[r]:
            return None
    combo = ExactMatrix.zero(target.dim)
    for c, b in zip(coeffs, basis):
        if c:
            combo = combo + b.scale(c)
    if combo != target:
        return None
    return coeffs
