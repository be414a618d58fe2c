"""Direct sums of line systems, where coordinate subsystems can be enumerated exactly.

Only coordinate sub-sums are treated as subsystems.  That is the model's
definition, not a claim about every subsystem of an actual direct sum.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .numerics import (
    CSType,
    CurveContext,
    RationalLike,
    SubTriple,
    alpha_slope,
    parse_rational,
    rank1_exists,
)
from .strata import segre_value
from .walls import alpha_of_subtype

MAX_SUMMANDS = 20

Subset = Tuple[int, ...]


@dataclass(frozen=True)
class SplitModel:
    ctx: CurveContext
    summands: Tuple[Tuple[int, int], ...]

    def __post_init__(self) -> None:
        summands = tuple((int(d), int(t)) for d, t in self.summands)
        object.__setattr__(self, "summands", summands)
        if not summands:
            raise ValueError("a split model needs at least one summand")
        if len(summands) > MAX_SUMMANDS:
            raise ValueError(f"at most {MAX_SUMMANDS} summands (subset count grows as 2^l)")
        for i, (d, t) in enumerate(summands, 1):
            if t < 0:
                raise ValueError(f"summand {i}: negative section count")
            if t > max(0, d + 1):
                raise ValueError(f"summand {i}: {t} sections exceed h0 <= d+1 = {d + 1}")
            if self.ctx.general_curve and t >= 1 and not rank1_exists(self.ctx, d, t):
                raise ValueError(
                    f"summand {i}: line system (1,{d},{t}) does not exist on a general curve "
                    f"of genus {self.ctx.genus}")

    @classmethod
    def from_dict(cls, data: dict) -> "SplitModel":
        missing = {"genus", "summands"} - set(data)
        if missing:
            raise ValueError(f"model file missing fields: {sorted(missing)}")
        ctx = CurveContext(int(data["genus"]), bool(data.get("general_curve", True)))
        return cls(ctx, tuple(tuple(s) for s in data["summands"]))

    @classmethod
    def load(cls, path) -> "SplitModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return {
            "genus": self.ctx.genus,
            "general_curve": self.ctx.general_curve,
            "summands": [list(s) for s in self.summands],
        }

    def __len__(self) -> int:
        return len(self.summands)


def total_type(M: SplitModel) -> CSType:
    return CSType(len(M.summands), sum(d for d, _ in M.summands), sum(t for _, t in M.summands))


def subset_type(M: SplitModel, subset: Subset) -> CSType:
    picked = [M.summands[i - 1] for i in subset]
    return CSType(len(picked), sum(d for d, _ in picked), sum(t for _, t in picked))


def coordinate_subtypes(M: SplitModel) -> List[Tuple[Subset, CSType]]:
    """Proper nonempty coordinate sub-sums, in binary-counting order (1-based indices)."""
    ell = len(M.summands)
    out = []
    for mask in range(1, 2 ** ell - 1):
        subset = tuple(i + 1 for i in range(ell) if mask >> i & 1)
        out.append((subset, subset_type(M, subset)))
    return out


def _as_sub(T: CSType) -> SubTriple:
    return SubTriple(T.n, T.d, T.k)


def equal_slope_alphas(M: SplitModel) -> List[Tuple[Fraction, List[Subset]]]:
    """Positive alphas where some coordinate sub-sum has the same slope as the total."""
    total = total_type(M)
    walls: Dict[Fraction, List[Subset]] = {}
    for subset, T in coordinate_subtypes(M):
        alpha = alpha_of_subtype(total, _as_sub(T))
        if alpha is not None and alpha > 0:
            walls.setdefault(alpha, []).append(subset)
    return sorted(walls.items())


def proportional_subsets(M: SplitModel) -> List[Subset]:
    """Sub-sums whose slope equals the total slope for every alpha (never a wall)."""
    total = total_type(M)
    return [
        subset for subset, T in coordinate_subtypes(M)
        if T.n * total.d == total.n * T.d and T.n * total.k == total.n * T.k
    ]


@dataclass(frozen=True)
class SemistabilityVerdict:
    semistable: bool
    violators: Tuple[Subset, ...]


def split_semistable(M: SplitModel, alpha: RationalLike) -> SemistabilityVerdict:
    alpha = parse_rational(alpha)
    total_slope = alpha_slope(total_type(M), alpha)
    violators = tuple(
        subset for subset, T in coordinate_subtypes(M)
        if alpha_slope(T, alpha) > total_slope
    )
    return SemistabilityVerdict(not violators, violators)


def split_segre(M: SplitModel, alpha: RationalLike, m: int, t: int) -> Optional[Fraction]:
    """Minimum Segre value over coordinate sub-sums of rank ``m`` with ``t`` sections.

    None means no such sub-sum exists (infinite invariant).
    """
    total = total_type(M)
    if not 0 < m < total.n or not 0 <= t <= total.k:
        raise ValueError(f"need 0 < m < {total.n} and 0 <= t <= {total.k}")
    values = [
        segre_value(alpha, total, _as_sub(T))
        for _, T in coordinate_subtypes(M)
        if T.n == m and T.k == t
    ]
    return min(values) if values else None


def parse_summands(text: str) -> List[Tuple[int, int]]:
    """``"6:3,7:1"`` -> ``[(6, 3), (7, 1)]``."""
    out = []
    for item in text.split(","):
        d, sep, t = item.partition(":")
        if not sep:
            raise ValueError(f"summand must be 'd:t', got {item!r}")
        out.append((int(d), int(t)))
    return out


def realized_pairs(M: SplitModel) -> List[Tuple[int, int]]:
    return sorted({(T.n, T.k) for _, T in coordinate_subtypes(M)})


def subsets_with(M: SplitModel, m: int, t: int) -> Sequence[Subset]:
    return [s for s, T in coordinate_subtypes(M) if T.n == m and T.k == t]
