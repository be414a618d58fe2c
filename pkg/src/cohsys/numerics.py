"""Exact numeric invariants of coherent systems on a curve.

Every quantity here is an integer or a :class:`fractions.Fraction`; there is
no floating point anywhere.  Numeric types are small frozen dataclasses so
they hash, compare and serialize predictably.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, Iterator, Tuple, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: RationalLike) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` (whitespace allowed) into a reduced Fraction.

    Decimal notation is rejected on purpose: values cross boundaries only as
    exact fractions.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise ValueError(f"malformed rational {text!r}; expected 'p' or 'p/q'")
    num = int(match.group(1))
    den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(value: Fraction | int) -> str:
    """Canonical string: ``"num/den"``, or ``"num"`` when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def split_alpha(alpha: RationalLike) -> Tuple[int, int]:
    """Return ``(p, q)`` with ``alpha = p/q`` in lowest terms and ``q > 0``."""
    alpha = parse_rational(alpha)
    return alpha.numerator, alpha.denominator


@dataclass(frozen=True)
class CurveContext:
    """Genus of the curve and whether it is Brill-Noether general."""

    genus: int
    general_curve: bool = True

    def __post_init__(self) -> None:
        if isinstance(self.genus, bool) or not isinstance(self.genus, int):
            raise TypeError("genus must be an integer")
        if self.genus < 2:
            raise ValueError(f"genus must be >= 2, got {self.genus}")


@dataclass(frozen=True, order=True)
class CSType:
    """Numeric type ``(n, d, k)``: rank, degree, number of sections."""

    n: int
    d: int
    k: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"rank must be >= 1, got {self.n}")
        if self.k < 0:
            raise ValueError(f"section count must be >= 0, got {self.k}")

    @classmethod
    def parse(cls, text: str) -> "CSType":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"type must be 'n,d,k', got {text!r}")
        return cls(*(int(p) for p in parts))

    def __str__(self) -> str:
        return f"({self.n},{self.d},{self.k})"

    def as_list(self) -> list:
        return [self.n, self.d, self.k]

    def __add__(self, other: "CSType") -> "CSType":
        return CSType(self.n + other.n, self.d + other.d, self.k + other.k)


@dataclass(frozen=True, order=True)
class SubTriple:
    """Numeric type ``(m, d', t)`` of a candidate subsystem.

    Field order is ``(m, dprime, t)`` to match how witnesses are printed;
    canonical *sorting* of witnesses uses :meth:`sort_key` instead.
    """

    m: int
    dprime: int
    t: int

    @classmethod
    def parse(cls, text: str) -> "SubTriple":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"subtype must be 'm,dprime,t', got {text!r}")
        return cls(*(int(p) for p in parts))

    def check(self, ambient: CSType) -> "SubTriple":
        if not 0 < self.m < ambient.n:
            raise ValueError(f"need 0 < m < {ambient.n}, got m={self.m}")
        if not 0 <= self.t <= ambient.k:
            raise ValueError(f"need 0 <= t <= {ambient.k}, got t={self.t}")
        return self

    def sort_key(self) -> Tuple[int, int, int]:
        return (self.m, self.t, self.dprime)

    def as_type(self) -> CSType:
        return CSType(self.m, self.dprime, self.t)

    def quotient(self, ambient: CSType) -> CSType:
        return CSType(ambient.n - self.m, ambient.d - self.dprime, ambient.k - self.t)

    def as_list(self) -> list:
        return [self.m, self.dprime, self.t]

    def __str__(self) -> str:
        return f"({self.m},{self.dprime},{self.t})"


class SubtypeSequence:
    """Dense table of rationals ``a[i, j]`` for ``0 < i < n`` and ``0 <= j <= k``.

    Missing or extra entries are a construction error.
    """

    def __init__(self, n: int, k: int, entries: Dict[Tuple[int, int], RationalLike]):
        if n < 1 or k < 0:
            raise ValueError(f"bad header n={n}, k={k}")
        expected = {(i, j) for i in range(1, n) for j in range(k + 1)}
        got = set(entries)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            raise ValueError(f"sequence indices wrong: missing={missing} extra={extra}")
        self.n = n
        self.k = k
        self._entries = {key: parse_rational(v) for key, v in entries.items()}

    def __getitem__(self, key: Tuple[int, int]) -> Fraction:
        return self._entries[key]

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(sorted(self._entries))

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubtypeSequence):
            return NotImplemented
        return (self.n, self.k, self._entries) == (other.n, other.k, other._entries)

    def __repr__(self) -> str:
        body = ", ".join(f"a{i}{j}={format_rational(self[i, j])}" for i, j in self)
        return f"SubtypeSequence(n={self.n}, k={self.k}, {body})"


def alpha_slope(T: CSType, alpha: RationalLike) -> Fraction:
    """``(d + alpha*k) / n``."""
    alpha = parse_rational(alpha)
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    return (T.d + alpha * T.k) / T.n


def slope_margin(ambient: CSType, sub: SubTriple, alpha: RationalLike) -> Fraction:
    """Slope of the ambient type minus slope of the subtype; > 0 means not destabilizing."""
    sub.check(ambient)
    return alpha_slope(ambient, alpha) - alpha_slope(sub.as_type(), alpha)


def margin_quantum(q: int, n: int, m: int) -> Fraction:
    """Smallest positive slope margin possible at ``alpha = p/q``: ``1/(q n m)``."""
    if q < 1 or n < 1 or m < 1:
        raise ValueError("q, n, m must be positive")
    return Fraction(1, q * n * m)


def brill_noether_number(ctx: CurveContext, T: CSType) -> int:
    g = ctx.genus
    return T.n ** 2 * (g - 1) + 1 - T.k * (T.k - T.d + T.n * (g - 1))


def rank1_exists(ctx: CurveContext, d: int, k: int) -> bool:
    """Existence of a line system ``(1, d, k)`` on a general curve."""
    if k == 0:
        return True
    return d > 0 and brill_noether_number(ctx, CSType(1, d, k)) >= 0


def c21(ctx: CurveContext, T1: CSType, T2: CSType) -> int:
    """Euler-characteristic term of ``dim Ext^1((E2,V2),(E1,V1))``."""
    g = ctx.genus
    n1, d1, k1 = T1.n, T1.d, T1.k
    n2, d2, k2 = T2.n, T2.d, T2.k
    return (n1 * n2 * (g - 1) - d1 * n2 + d2 * n1
            + k2 * d1 - k2 * n1 * (g - 1) - k1 * k2)


def ext_positivity(ctx: CurveContext, T1: CSType, T2: CSType) -> int:
    """Left-hand side of the extension-existence inequality used for certificates.

    Kept in its stated form, which differs
    from :func:`c21` in the ``t2 n1 (g-1)`` sign and lacks the ``t2 d1`` term.
    """
    g = ctx.genus
    n1, d1, t1 = T1.n, T1.d, T1.k
    n2, d2, t2 = T2.n, T2.d, T2.k
    return n1 * n2 * (g - 1) - d1 * n2 + d2 * n1 + t2 * n1 * (g - 1) - t1 * t2


def diophantine_unit_value(p: int, q: int, T1: CSType, T2: CSType) -> int:
    """``q(n1 d2 - n2 d1) + p(n1 t2 - n2 t1)``; equals 1 in the certificate condition."""
    if q < 1 or p < 0:
        raise ValueError(f"need p >= 0 and q >= 1, got p={p}, q={q}")
    if gcd(p, q) != 1:
        raise ValueError(f"alpha {p}/{q} is not in lowest terms")
    return q * (T1.n * T2.d - T2.n * T1.d) + p * (T1.n * T2.k - T2.n * T1.k)


def cotype_dual_sequence(a: SubtypeSequence) -> SubtypeSequence:
    """``b[i, j] = a[n-i, k-j] * (n-i) / i``; a subtype-(a) system is exactly cotype-(b)."""
    n, k = a.n, a.k
    return SubtypeSequence(n, k, {
        (i, j): a[n - i, k - j] * Fraction(n - i, i)
        for i in range(1, n) for j in range(k + 1)
    })


def extended_gcd(x: int, y: int) -> Tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``g = gcd(x, y) > 0`` and ``u*x + v*y == g``."""
    if x == 0 and y == 0:
        raise ValueError("extended_gcd(0, 0) is undefined")
    old_r, r = x, y
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_u, u = u, old_u - quot * u
        old_v, v = v, old_v - quot * v
    if old_r < 0:
        old_r, old_u, old_v = -old_r, -old_u, -old_v
    return old_r, old_u, old_v
