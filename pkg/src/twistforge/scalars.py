"""Exact scalar arithmetic.

A scalar is a Gaussian rational (exact rational real and imaginary parts)
optionally extended by a first-order nilpotent component ``eps`` with
``eps**2 = 0``.  The nilpotent component is itself a Gaussian rational
coefficient, so a scalar is ``(re + im*i) + (er + ei*i)*eps``.

No floating point is used anywhere; every operation is exact.
"""

from __future__ import annotations

import re as _re
from typing import Union

from gmpy2 import mpq

Rational = mpq
RationalLike = Union[int, str, mpq]

_ZERO_Q = mpq(0)
_ONE_Q = mpq(1)


def rat(x: RationalLike) -> mpq:
    """Coerce an int, ``p/q`` string or mpq into an exact rational."""
    if isinstance(x, mpq):
        return x
    return mpq(x)


class Scalar:
    """Immutable exact scalar ``(re + im*i) + (er + ei*i)*eps``."""

    __slots__ = ("re", "im", "er", "ei", "_hash")

    def __init__(self, re=0, im=0, er=0, ei=0):
        object.__setattr__(self, "re", rat(re))
        object.__setattr__(self, "im", rat(im))
        object.__setattr__(self, "er", rat(er))
        object.__setattr__(self, "ei", rat(ei))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def of(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        return Scalar(rat(x))

    # -- predicates ---------------------------------------------------

    def is_zero(self) -> bool:
        return not (self.re or self.im or self.er or self.ei)

    def is_one(self) -> bool:
        return self.re == _ONE_Q and not (self.im or self.er or self.ei)

    def is_rational(self) -> bool:
        return not (self.im or self.er or self.ei)

    def has_eps(self) -> bool:
        return bool(self.er or self.ei)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- structure ----------------------------------------------------

    def body(self) -> "Scalar":
        """The eps-free part."""
        return Scalar(self.re, self.im)

    def eps_part(self) -> "Scalar":
        """The coefficient of eps, as an ordinary Gaussian rational."""
        return Scalar(self.er, self.ei)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other) -> "Scalar":
        o = Scalar.of(other)
        return Scalar(self.re + o.re, self.im + o.im, self.er + o.er, self.ei + o.ei)

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        o = Scalar.of(other)
        return Scalar(self.re - o.re, self.im - o.im, self.er - o.er, self.ei - o.ei)

    def __rsub__(self, other) -> "Scalar":
        return Scalar.of(other) - self

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im, -self.er, -self.ei)

    def __mul__(self, other) -> "Scalar":
        o = Scalar.of(other)
        a, b, c, d = self.re, self.im, self.er, self.ei
        x, y, u, v = o.re, o.im, o.er, o.ei
        # (a+bi)(x+yi) body; eps part collects body*eps cross terms, eps^2 = 0.
        re = a * x - b * y
        im = a * y + b * x
        er = a * u - b * v + c * x - d * y
        ei = a * v + b * u + c * y + d * x
        return Scalar(re, im, er, ei)

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        """Exact inverse; defined iff the eps-free part is nonzero."""
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("scalar with zero body is not invertible")
        binv = Scalar(self.re / n, -self.im / n)
        if not (self.er or self.ei):
            return binv
        # (x + eps*y)^(-1) = x^(-1) - eps * y * x^(-2)
        eps_coeff = -(self.eps_part() * binv * binv)
        return Scalar(binv.re, binv.im, eps_coeff.re, eps_coeff.im)

    def __truediv__(self, other) -> "Scalar":
        return self * Scalar.of(other).inverse()

    def __rtruediv__(self, other) -> "Scalar":
        return Scalar.of(other) * self.inverse()

    def __pow__(self, n: int) -> "Scalar":
        if not isinstance(n, int) or n < 0:
            raise ValueError("Scalar powers take nonnegative integer exponents")
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison / hashing ------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Scalar):
            if isinstance(other, (int, mpq)):
                other = Scalar(other)
            else:
                return NotImplemented
        return (
            self.re == other.re
            and self.im == other.im
            and self.er == other.er
            and self.ei == other.ei
        )

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.re, self.im, self.er, self.ei))
            object.__setattr__(self, "_hash", h)
        return h

    # -- formatting -----------------------------------------------------

    def __str__(self) -> str:
        return format_scalar(self)

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self)!r})"


ZERO = Scalar(0)
ONE = Scalar(1)
I_UNIT = Scalar(0, 1)
EPS = Scalar(0, 0, 1)

HALF = Scalar(mpq(1, 2))


def format_scalar(s: Scalar) -> str:
    """Canonical string form, e.g. ``1/2-3i+2eps-1/3ieps``."""
    parts = []
    for coeff, suffix in ((s.re, ""), (s.im, "i"), (s.er, "eps"), (s.ei, "ieps")):
        if not coeff:
            continue
        text = str(coeff)
        if parts and not text.startswith("-"):
            text = "+" + text
        parts.append(text + suffix)
    return "".join(parts) if parts else "0"


_TOKEN = _re.compile(r"([+-]?)(\d+(?:/\d+)?)?(ieps|eps|i)?")


def parse_scalar(text: str) -> Scalar:
    """Inverse of :func:`format_scalar`.

    Accepts sums of monomials ``p/q``, ``p/q i``, ``p/q eps``, ``p/q ieps``
    with optional ``*`` separators, e.g. ``"1"``, ``"-1/2i"``, ``"2*eps"``.
    """
    cleaned = text.replace(" ", "").replace("*", "")
    if not cleaned:
        raise ValueError("empty scalar string")
    pos = 0
    re_ = im = er = ei = _ZERO_Q
    while pos < len(cleaned):
        m = _TOKEN.match(cleaned, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse scalar {text!r} at offset {pos}")
        sign, num, suffix = m.groups()
        if num is None and suffix is None:
            raise ValueError(f"cannot parse scalar {text!r} at offset {pos}")
        value = mpq(num) if num is not None else _ONE_Q
        if sign == "-":
            value = -value
        if suffix is None or suffix == "":
            re_ += value
        elif suffix == "i":
            im += value
        elif suffix == "eps":
            er += value
        else:
            ei += value
        pos = m.end()
    return Scalar(re_, im, er, ei)
