"""Segre-invariant values, stratum labels, theorem checkers and non-emptiness certificates."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .numerics import (
    CSType,
    CurveContext,
    RationalLike,
    SubTriple,
    brill_noether_number,
    c21,
    diophantine_unit_value,
    ext_positivity,
    format_rational,
    parse_rational,
    rank1_exists,
    split_alpha,
)
from .walls import is_retained_wall

INF = "inf"

POSITIVITY_RULES = ("stated", "c21")

RANK1_BN = "rank1-brill-noether"
RECURSIVE = "recursive-certificate"
ASSUMED = "assumed-nonempty"


@dataclass(frozen=True)
class StratumLabel:
    """Value ``s`` of the ``(m, t)`` Segre invariant; ``s=None`` is the infinite label."""

    m: int
    t: int
    s: Optional[Fraction]
    witness_dprime: Optional[int] = None

    @property
    def is_infinite(self) -> bool:
        return self.s is None

    def sort_key(self):
        return (1, 0) if self.s is None else (0, self.s)

    def text(self) -> str:
        return INF if self.s is None else format_rational(self.s)

    def to_dict(self) -> dict:
        return {"m": self.m, "t": self.t, "s": self.text(), "dprime": self.witness_dprime}


def segre_value(alpha: RationalLike, ambient: CSType, sub: SubTriple) -> Fraction:
    """``(m d - n d') + alpha (m k - n t)``: one subsystem's Segre contribution."""
    sub.check(ambient)
    alpha = parse_rational(alpha)
    n, d, k = ambient.n, ambient.d, ambient.k
    return (sub.m * d - n * sub.dprime) + alpha * (sub.m * k - n * sub.t)


def segre_upper_bound(ctx: CurveContext, ambient: CSType, m: int, t: int,
                      alpha: RationalLike) -> Fraction:
    """``m(n-m)(g-1) + (n-1) + alpha(m k - n t)``."""
    n, k = ambient.n, ambient.k
    if not 0 < m < n or not 0 <= t <= k:
        raise ValueError(f"need 0 < m < {n} and 0 <= t <= {k}")
    alpha = parse_rational(alpha)
    return m * (n - m) * (ctx.genus - 1) + (n - 1) + alpha * (m * k - n * t)


def enumerate_stratum_labels(ctx: CurveContext, ambient: CSType, m: int, t: int,
                             alpha: RationalLike, prune: bool = True, *,
                             positive_degree: bool = True) -> List[StratumLabel]:
    """Possible values of the ``(m, t)`` Segre invariant on the alpha-stable locus.

    Finite labels satisfy ``0 < s <= segre_upper_bound``; the infinite label
    is always last.  With ``prune`` on a general curve, labels whose rank-1
    sub or quotient cannot exist are dropped.
    """
    alpha = parse_rational(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    bound = segre_upper_bound(ctx, ambient, m, t, alpha)
    if is_retained_wall(ctx, ambient, alpha, prune=ctx.general_curve,
                        positive_degree=positive_degree):
        raise ValueError(f"alpha={format_rational(alpha)} is a critical value for {ambient}")
    n, d, k = ambient.n, ambient.d, ambient.k
    shift = m * d + alpha * (m * k - n * t)
    # s(d') = shift - n d'; need 0 < s <= bound
    lo = math.ceil((shift - bound) / n)
    hi = math.ceil(shift / n) - 1
    labels = []
    for dp in range(lo, hi + 1):
        if positive_degree and t >= 1 and dp <= 0:
            continue
        sub = SubTriple(m, dp, t)
        if prune and ctx.general_curve:
            quot = sub.quotient(ambient)
            if m == 1 and not rank1_exists(ctx, dp, t):
                continue
            if quot.n == 1 and not rank1_exists(ctx, quot.d, quot.k):
                continue
        labels.append(StratumLabel(m, t, segre_value(alpha, ambient, sub), dp))
    labels.sort(key=StratumLabel.sort_key)
    labels.append(StratumLabel(m, t, None))
    return labels


@dataclass(frozen=True)
class TransferVerdict:
    applies: bool
    unit_value: int
    sub: CSType
    quotient: CSType
    segre: Optional[Fraction]

    def conclusions(self) -> List[str]:
        if not self.applies:
            return []
        return [
            f"subsystem {self.sub} is alpha-stable",
            f"subsystem {self.sub} is maximal",
            f"quotient {self.quotient} is alpha-stable",
            f"Segre invariant equals {format_rational(self.segre)}",
        ]

    def to_dict(self) -> dict:
        return {
            "applies": self.applies,
            "unit_value": self.unit_value,
            "sub": self.sub.as_list(),
            "quotient": self.quotient.as_list(),
            "segre": None if self.segre is None else format_rational(self.segre),
            "conclusions": self.conclusions(),
        }


def stability_transfer_check(alpha: RationalLike, ambient: CSType,
                             sub: SubTriple) -> TransferVerdict:
    """For an alpha-stable system of type ``ambient`` with principal subsystem ``sub``.

    When ``q(m d - n d') + p(m k - n t) == 1`` the subsystem is alpha-stable
    and maximal, its quotient is alpha-stable, and the Segre invariant is 1/q.
    """
    p, q = split_alpha(alpha)
    sub.check(ambient)
    n, d, k = ambient.n, ambient.d, ambient.k
    unit = q * (sub.m * d - n * sub.dprime) + p * (sub.m * k - n * sub.t)
    applies = unit == 1
    return TransferVerdict(applies, unit, sub.as_type(), sub.quotient(ambient),
                           Fraction(1, q) if applies else None)


@dataclass(frozen=True)
class ExtensionVerdict:
    applies: bool
    unit_value: int
    sub: CSType
    quotient: CSType
    total: CSType
    segre: Optional[Fraction]

    def to_dict(self) -> dict:
        conclusions = []
        if self.applies:
            conclusions = [
                f"every non-trivial extension of {self.quotient} by {self.sub} "
                f"is alpha-stable of type {self.total}",
                f"its ({self.sub.n},{self.sub.k}) Segre invariant equals "
                f"{format_rational(self.segre)}",
            ]
        return {
            "applies": self.applies,
            "unit_value": self.unit_value,
            "sub": self.sub.as_list(),
            "quotient": self.quotient.as_list(),
            "total": self.total.as_list(),
            "segre": None if self.segre is None else format_rational(self.segre),
            "conclusions": conclusions,
        }


def extension_stability_check(alpha: RationalLike, subT: CSType,
                              quotT: CSType) -> ExtensionVerdict:
    """Both pieces alpha-stable and ``q(m d_G - m' d_F) + p(m t' - m' t) == 1``."""
    p, q = split_alpha(alpha)
    m, dF, t = subT.n, subT.d, subT.k
    m2, dG, t2 = quotT.n, quotT.d, quotT.k
    unit = q * (m * dG - m2 * dF) + p * (m * t2 - m2 * t)
    applies = unit == 1
    return ExtensionVerdict(applies, unit, subT, quotT, subT + quotT,
                            Fraction(1, q) if applies else None)


@dataclass(frozen=True)
class Justification:
    kind: str
    beta: Optional[int] = None
    certificate: Optional["SplittingCertificate"] = None

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.beta is not None:
            out["beta"] = self.beta
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out


@dataclass(frozen=True)
class SplittingCertificate:
    """Witness that ``G(alpha; node; left.n, left.k; 1/q)`` is non-empty."""

    alpha: Fraction
    node: CSType
    left: CSType
    right: CSType
    left_why: Justification
    right_why: Justification
    unit_value: int
    positivity: int
    positivity_rule: str
    c21: int

    @property
    def stratum_segre(self) -> Fraction:
        return Fraction(1, self.alpha.denominator)

    def to_dict(self) -> dict:
        return {
            "alpha": format_rational(self.alpha),
            "node": self.node.as_list(),
            "left": self.left.as_list(),
            "right": self.right.as_list(),
            "left_justification": self.left_why.to_dict(),
            "right_justification": self.right_why.to_dict(),
            "unit_value": self.unit_value,
            "ext_positivity": self.positivity,
            "positivity_rule": self.positivity_rule,
            "c21": self.c21,
            "stratum": {
                "m": self.left.n,
                "t": self.left.k,
                "s": format_rational(self.stratum_segre),
            },
        }


def _positivity(ctx: CurveContext, T1: CSType, T2: CSType, rule: str) -> int:
    if rule == "stated":
        return ext_positivity(ctx, T1, T2)
    if rule == "c21":
        return c21(ctx, T1, T2)
    raise ValueError(f"unknown positivity rule {rule!r}")


def _justify(ctx: CurveContext, alpha: Fraction, piece: CSType, depth: int,
             allow_assumed: bool, rule: str) -> Optional[Justification]:
    if piece.n == 1:
        if ctx.general_curve:
            if rank1_exists(ctx, piece.d, piece.k):
                return Justification(RANK1_BN, beta=brill_noether_number(ctx, piece))
            return None
    elif depth > 1 and piece.k >= 1:
        sub_cert = _search(ctx, alpha, piece, depth - 1, allow_assumed, rule, workers=1)
        if sub_cert is not None:
            return Justification(RECURSIVE, certificate=sub_cert)
    return Justification(ASSUMED) if allow_assumed else None


def _splittings(target: CSType):
    n, d, k = target.n, target.d, target.k
    for n1, d1, t1 in itertools.product(range(1, n), range(1, d), range(k + 1)):
        yield CSType(n1, d1, t1), CSType(n - n1, d - d1, k - t1)


def _try_split(ctx, alpha, p, q, target, left, right, depth, allow_assumed, rule):
    unit = diophantine_unit_value(p, q, left, right)
    if unit != 1:
        return None
    pos = _positivity(ctx, left, right, rule)
    if pos <= 0:
        return None
    lw = _justify(ctx, alpha, left, depth, allow_assumed, rule)
    if lw is None:
        return None
    rw = _justify(ctx, alpha, right, depth, allow_assumed, rule)
    if rw is None:
        return None
    return SplittingCertificate(alpha, target, left, right, lw, rw, unit, pos, rule,
                                c21(ctx, left, right))


def _search(ctx, alpha, target, depth, allow_assumed, rule, workers):
    p, q = alpha.numerator, alpha.denominator
    splits = list(_splittings(target))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(
                lambda lr: _try_split(ctx, alpha, p, q, target, lr[0], lr[1],
                                      depth, allow_assumed, rule),
                splits)
            # map preserves input order, so the first hit is the least splitting
            for cert in results:
                if cert is not None:
                    return cert
        return None
    for left, right in splits:
        cert = _try_split(ctx, alpha, p, q, target, left, right, depth, allow_assumed, rule)
        if cert is not None:
            return cert
    return None


def nonemptiness_certificate(ctx: CurveContext, alpha: RationalLike, target: CSType,
                             depth: int = 2, *, allow_assumed: bool = False,
                             positivity: str = "stated",
                             workers: int = 1) -> Optional[SplittingCertificate]:
    """Search splittings ``target = left + right`` that make a stratum provably non-empty.

    Returns the certificate with lexicographically least ``left = (n1, d1, t1)``,
    or None when none exists within ``depth`` levels of recursion.  Rank-1
    pieces are justified by Brill-Noether on a general curve; higher-rank
    pieces need a nested certificate, or ``allow_assumed``.
    """
    alpha = parse_rational(alpha)
    if alpha.numerator <= 0:
        raise ValueError("alpha must be > 0")
    if target.d <= 0:
        raise ValueError(f"target degree must be > 0, got {target.d}")
    if target.n < 2 or target.k < 1:
        raise ValueError(f"target needs n >= 2 and k >= 1, got {target}")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if positivity not in POSITIVITY_RULES:
        raise ValueError(f"positivity must be one of {POSITIVITY_RULES}")
    return _search(ctx, alpha, target, depth, allow_assumed, positivity, workers)


def validate_certificate(ctx: CurveContext, cert: SplittingCertificate) -> List[str]:
    """Recompute every recorded check from scratch; return the list of problems found."""
    problems = []
    p, q = cert.alpha.numerator, cert.alpha.denominator
    if cert.left + cert.right != cert.node:
        problems.append("pieces do not sum to node")
    unit = diophantine_unit_value(p, q, cert.left, cert.right)
    if unit != cert.unit_value or unit != 1:
        problems.append(f"unit value {unit} (recorded {cert.unit_value})")
    pos = _positivity(ctx, cert.left, cert.right, cert.positivity_rule)
    if pos != cert.positivity or pos <= 0:
        problems.append(f"positivity {pos} (recorded {cert.positivity})")
    if c21(ctx, cert.left, cert.right) != cert.c21:
        problems.append("c21 mismatch")
    if min(cert.left.d, cert.right.d) <= 0:
        problems.append("non-positive piece degree")
    for piece, why in ((cert.left, cert.left_why), (cert.right, cert.right_why)):
        if why.kind == RANK1_BN:
            if piece.n != 1 or not ctx.general_curve or not rank1_exists(ctx, piece.d, piece.k):
                problems.append(f"rank-1 justification invalid for {piece}")
            elif why.beta != brill_noether_number(ctx, piece):
                problems.append(f"beta mismatch for {piece}")
        elif why.kind == RECURSIVE:
            sub = why.certificate
            if sub is None or sub.node != piece or sub.alpha != cert.alpha:
                problems.append(f"nested certificate does not cover {piece}")
            else:
                problems.extend(validate_certificate(ctx, sub))
        elif why.kind != ASSUMED:
            problems.append(f"unknown justification {why.kind!r}")
    return problems


def stratum_dim_bound(ctx: CurveContext, T1: CSType, T2: CSType, dimG1: int, dimG2: int,
                      ext2: int = 0) -> int:
    """``dim G1 + dim G2 + C21 + ext2 - 1`` where ``ext2`` is the constant Ext^2 dimension."""
    if dimG1 < 0 or dimG2 < 0 or ext2 < 0:
        raise ValueError("dimensions must be >= 0")
    return dimG1 + dimG2 + c21(ctx, T1, T2) + ext2 - 1


def rank1_moduli_dim(ctx: CurveContext, d: int, k: int) -> Optional[int]:
    """Dimension of the moduli of line systems ``(1, d, k)``, or None if there are none."""
    if not ctx.general_curve:
        raise ValueError("rank-1 moduli dimensions need a general curve")
    if d <= 0 and k != 0:
        raise ValueError("need d > 0 or k = 0")
    if not rank1_exists(ctx, d, k):
        return None
    return brill_noether_number(ctx, CSType(1, d, k))


def classical_stratum_dims(g: int, s: int, n: Optional[int] = None,
                           m: Optional[int] = None) -> int:
    """Segre strata dimensions of stable bundles.

    ``n=None`` gives the rank-2 ``M(2,d;s)`` formula; otherwise the
    ``M^0(n,d;m;s)`` component formula.  At ``s = m(n-m)(g-1)`` both branches
    of the latter apply and disagree; the first is used.
    """
    if g < 2:
        raise ValueError("genus must be >= 2")
    if s <= 0:
        raise ValueError("s must be > 0")
    if n is None:
        if m not in (None, 1):
            raise ValueError("rank-2 form takes m=1 only")
        return 3 * g + s - 2 if s <= g - 2 else 4 * g - 3
    if m is None or not 0 < m < n:
        raise ValueError(f"need 0 < m < n, got n={n}, m={m}")
    if s <= m * (n - m) * (g - 1):
        return (n * n + m * m - n * m) * (g - 1) + s - 1
    return n * n * (g - 1) + 1
