"""Virtual critical values of alpha, Brill-Noether pruning and chamber partitions."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .numerics import (
    CSType,
    CurveContext,
    RationalLike,
    SubTriple,
    brill_noether_number,
    format_rational,
    parse_rational,
    rank1_exists,
)

logger = logging.getLogger(__name__)

VIRTUAL = "virtual"
CANDIDATE = "candidate-actual"
PRUNED = "pruned"


@dataclass(frozen=True)
class AlphaWindow:
    """Open interval ``(lo, hi)``; ``hi=None`` stands for +infinity."""

    lo: Fraction
    hi: Optional[Fraction] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", parse_rational(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", parse_rational(self.hi))
        if self.lo < 0:
            raise ValueError("window lower end must be >= 0")
        if self.hi is not None and not self.lo < self.hi:
            raise ValueError(f"empty window ({self.lo}, {self.hi})")

    @classmethod
    def parse(cls, text: str) -> "AlphaWindow":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 2:
            raise ValueError(f"window must be 'lo,hi', got {text!r}")
        hi = None if parts[1].lower() in ("inf", "oo", "infinity") else parse_rational(parts[1])
        return cls(parse_rational(parts[0]), hi)

    @classmethod
    def default_for(cls, ambient: CSType) -> "AlphaWindow":
        """``(0, d/(n-k))`` when ``k < n``; no default exists otherwise."""
        if ambient.k >= ambient.n:
            raise ValueError(
                f"type {ambient} has k >= n; an explicit finite window upper end is required")
        hi = Fraction(ambient.d, ambient.n - ambient.k)
        if hi <= 0:
            raise ValueError(f"type {ambient} has empty alpha-range (0, {format_rational(hi)})")
        return cls(Fraction(0), hi)

    def __contains__(self, alpha: Fraction) -> bool:
        return self.lo < alpha and (self.hi is None or alpha < self.hi)

    def to_list(self) -> list:
        return [format_rational(self.lo), "inf" if self.hi is None else format_rational(self.hi)]


@dataclass(frozen=True)
class CriticalValue:
    value: Fraction
    witnesses: Tuple[SubTriple, ...]
    status: str = VIRTUAL
    # witnesses removed by pruning, each with the reason it failed
    pruned_witnesses: Tuple[Tuple[SubTriple, str], ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "value": format_rational(self.value),
            "status": self.status,
            "witnesses": [w.as_list() for w in self.witnesses],
            "pruned_witnesses": [
                {"witness": w.as_list(), "reason": why} for w, why in self.pruned_witnesses
            ],
        }


@dataclass(frozen=True)
class Chamber:
    label: str
    lo: Fraction
    hi: Optional[Fraction]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "lo": format_rational(self.lo),
            "hi": "inf" if self.hi is None else format_rational(self.hi),
        }


@dataclass(frozen=True)
class ChamberPartition:
    window: AlphaWindow
    walls: Tuple[CriticalValue, ...]
    chambers: Tuple[Chamber, ...]

    def chamber_of(self, alpha: RationalLike) -> Optional[Chamber]:
        alpha = parse_rational(alpha)
        for ch in self.chambers:
            if ch.lo < alpha and (ch.hi is None or alpha < ch.hi):
                return ch
        return None


def alpha_of_subtype(ambient: CSType, sub: SubTriple) -> Optional[Fraction]:
    """The alpha where ``sub`` and ``ambient`` have equal slope, or None if alpha-independent."""
    sub.check(ambient)
    denom = ambient.n * sub.t - sub.m * ambient.k
    if denom == 0:
        return None
    return Fraction(sub.m * ambient.d - ambient.n * sub.dprime, denom)


def _dprime_range(ambient: CSType, m: int, t: int, window: AlphaWindow) -> range:
    # alpha(d') = (m d - n d') / D is strictly monotone in d', so the open
    # window pins d' to an open real interval with ends (m d - a D) / n.
    n, d, k = ambient.n, ambient.d, ambient.k
    D = n * t - m * k
    ends = [(m * d - window.lo * D) / n]
    if window.hi is not None:
        ends.append((m * d - window.hi * D) / n)
    lo_end, hi_end = (ends[1], ends[0]) if D > 0 else (ends[0], ends[1])
    start = math.floor(lo_end) + 1
    stop = math.ceil(hi_end)  # exclusive
    return range(start, stop)


def _scan_pair(ambient: CSType, m: int, t: int, window: AlphaWindow,
               positive_degree: bool) -> List[Tuple[Fraction, SubTriple]]:
    out = []
    for dp in _dprime_range(ambient, m, t, window):
        if positive_degree and t >= 1 and dp <= 0:
            continue
        sub = SubTriple(m, dp, t)
        alpha = alpha_of_subtype(ambient, sub)
        if alpha in window:
            out.append((alpha, sub))
    return out


def enumerate_virtual_criticals(ambient: CSType, window: Optional[AlphaWindow] = None, *,
                                positive_degree: bool = True,
                                workers: int = 1) -> List[CriticalValue]:
    """All virtual walls strictly inside ``window``, ascending, with complete witness lists.

    ``positive_degree`` drops witnesses with sections but non-positive degree.
    ``workers > 1`` fans the ``(m, t)`` scans out to a thread pool; the merge
    is order-independent.
    """
    if window is None:
        window = AlphaWindow.default_for(ambient)
    if window.hi is None and ambient.k >= ambient.n:
        raise ValueError(
            f"type {ambient} has k >= n: the wall set over an unbounded window has no "
            "enumeration bound; pass a finite window upper end")
    pairs = [(m, t) for m in range(1, ambient.n) for t in range(ambient.k + 1)
             if ambient.n * t != m * ambient.k]
    if window.hi is None:
        # k < n: the alpha-range ends at d/(n-k)
        cap = AlphaWindow.default_for(ambient).hi
        logger.info("unbounded window capped at d/(n-k) = %s", format_rational(cap))
        window = AlphaWindow(window.lo, cap)

    def job(pair):
        return _scan_pair(ambient, pair[0], pair[1], window, positive_degree)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(job, pairs))
    else:
        chunks = [job(p) for p in pairs]

    by_value: Dict[Fraction, List[SubTriple]] = {}
    for chunk in chunks:
        for alpha, sub in chunk:
            by_value.setdefault(alpha, []).append(sub)
    return [
        CriticalValue(value, tuple(sorted(set(subs), key=SubTriple.sort_key)))
        for value, subs in sorted(by_value.items())
    ]


def witnesses_at(ambient: CSType, alpha: RationalLike, *,
                 positive_degree: bool = True) -> Optional[CriticalValue]:
    """The virtual wall at exactly ``alpha``, or None if ``alpha`` is not one."""
    alpha = parse_rational(alpha)
    if alpha <= 0:
        return None
    n, d, k = ambient.n, ambient.d, ambient.k
    subs = []
    for m in range(1, n):
        for t in range(k + 1):
            D = n * t - m * k
            if D == 0:
                continue
            dp = (m * d - alpha * D) / n
            if dp.denominator != 1:
                continue
            dp = dp.numerator
            if positive_degree and t >= 1 and dp <= 0:
                continue
            subs.append(SubTriple(m, dp, t))
    if not subs:
        return None
    return CriticalValue(alpha, tuple(sorted(subs, key=SubTriple.sort_key)))


def _rank1_failure(ctx: CurveContext, piece: CSType, role: str) -> Optional[str]:
    if piece.n != 1 or rank1_exists(ctx, piece.d, piece.k):
        return None
    if piece.d <= 0:
        return f"{role} {piece}: degree <= 0 with sections"
    return f"{role} {piece}: beta={brill_noether_number(ctx, piece)}"


def prune_by_brill_noether(ctx: CurveContext, ambient: CSType,
                           walls: Iterable[CriticalValue]) -> List[CriticalValue]:
    """Drop witnesses whose rank-1 sub or quotient cannot exist on a general curve.

    Higher-rank pieces are never used to prune.  On a non-general curve the
    walls come back unchanged.
    """
    walls = list(walls)
    if not ctx.general_curve:
        logger.info("curve not general: Brill-Noether pruning skipped")
        return walls
    out = []
    for wall in walls:
        kept, dropped = [], list(wall.pruned_witnesses)
        for w in wall.witnesses:
            reason = (_rank1_failure(ctx, w.as_type(), "sub")
                      or _rank1_failure(ctx, w.quotient(ambient), "quotient"))
            if reason is None:
                kept.append(w)
            else:
                dropped.append((w, reason))
        status = CANDIDATE if kept else PRUNED
        out.append(replace(wall, witnesses=tuple(kept), status=status,
                           pruned_witnesses=tuple(dropped)))
    return out


def retained_walls(walls: Iterable[CriticalValue]) -> List[CriticalValue]:
    return [w for w in walls if w.status != PRUNED]


def is_retained_wall(ctx: CurveContext, ambient: CSType, alpha: RationalLike, *,
                     prune: bool = True, positive_degree: bool = True) -> bool:
    wall = witnesses_at(ambient, alpha, positive_degree=positive_degree)
    if wall is None:
        return False
    if prune:
        wall = prune_by_brill_noether(ctx, ambient, [wall])[0]
    return wall.status != PRUNED


def chamber_partition(ambient: CSType, window: AlphaWindow,
                      walls: Sequence[CriticalValue]) -> ChamberPartition:
    """Open chambers ``G_0 .. G_L`` between consecutive retained walls.

    Pruned walls in ``walls`` are skipped, so the output of
    :func:`prune_by_brill_noether` can be passed directly.
    """
    kept = retained_walls(walls)
    values = [w.value for w in kept]
    if values != sorted(values) or len(set(values)) != len(values):
        raise ValueError("walls must be strictly ascending")
    for v in values:
        if v not in window:
            raise ValueError(f"wall {format_rational(v)} lies outside the window")
    ends: List[Optional[Fraction]] = [window.lo, *values, window.hi]
    chambers = tuple(
        Chamber(f"G_{i}", ends[i], ends[i + 1]) for i in range(len(ends) - 1)
    )
    return ChamberPartition(window, tuple(kept), chambers)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def margin_sign_profile(ambient: CSType, sub: SubTriple,
                        wall: Optional[RationalLike]) -> Tuple[int, int, int]:
    """Signs of the slope margin just below, at, and just above ``wall``.

    The margin is affine in alpha with slope ``(m k - n t)/(n m)``, so the
    profile follows from that slope alone.  For an alpha-independent subtype
    with zero margin pass ``wall=None`` (or any alpha) to get ``(0, 0, 0)``.
    """
    sub.check(ambient)
    at = alpha_of_subtype(ambient, sub)
    rate = _sign(sub.m * ambient.k - ambient.n * sub.t)
    if at is None:
        const = sub.m * ambient.d - ambient.n * sub.dprime
        if const != 0:
            raise ValueError(f"subtype {sub} never has equal slope with {ambient}")
        return (0, 0, 0)
    if wall is None or parse_rational(wall) != at:
        raise ValueError(
            f"subtype {sub} meets {ambient} at alpha={format_rational(at)}, not {wall}")
    return (-rate, 0, rate)


def format_sign(s: int) -> str:
    return {1: "+", 0: "0", -1: "-"}[s]
