"""Schema-versioned reports and the genus-6, type (2,13,4) worked example."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List

from .numerics import (
    CSType,
    CurveContext,
    SubTriple,
    alpha_slope,
    brill_noether_number,
    c21,
    ext_positivity,
    format_rational,
)
from .split import SplitModel, equal_slope_alphas, split_semistable
from .strata import (
    enumerate_stratum_labels,
    extension_stability_check,
    nonemptiness_certificate,
    rank1_moduli_dim,
    segre_upper_bound,
    stability_transfer_check,
    stratum_dim_bound,
)
from .walls import (
    AlphaWindow,
    chamber_partition,
    enumerate_virtual_criticals,
    format_sign,
    margin_sign_profile,
    prune_by_brill_noether,
    retained_walls,
)

SCHEMA = "cohsys_strata_report_v1"


@dataclass
class Report:
    command: str
    inputs: Dict[str, Any]
    result: Dict[str, Any]
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "result": self.result,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(data["command"], data["inputs"], data["result"], list(data.get("notes", [])))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def _labels(ctx, ambient, alpha, prune):
    return [lab.text() for lab in enumerate_stratum_labels(ctx, ambient, 1, 3, alpha, prune)]


def report_g6(workers: int = 1) -> Report:
    """Full pipeline for type (2,13,4) on a general curve of genus 6."""
    ctx = CurveContext(6, True)
    ambient = CSType(2, 13, 4)
    window = AlphaWindow(Fraction(0), Fraction(1))
    sub, quot = SubTriple(1, 6, 3), CSType(1, 7, 1)

    virtual = enumerate_virtual_criticals(ambient, window, workers=workers)
    pruned = prune_by_brill_noether(ctx, ambient, virtual)
    kept = retained_walls(pruned)
    partition = chamber_partition(ambient, window, pruned)
    first = kept[0].value

    strata = {}
    for p in (1, 2, 3):
        alpha = Fraction(p, 2 * p + 1)
        strata[f"p{p}"] = {
            "alpha": format_rational(alpha),
            "chamber": partition.chamber_of(alpha).label,
            "labels": _labels(ctx, ambient, alpha, True),
            "unpruned_labels": _labels(ctx, ambient, alpha, False),
            "upper_bound": format_rational(segre_upper_bound(ctx, ambient, 1, 3, alpha)),
        }

    certificates = {}
    for p in (1, 2, 3):
        cert = nonemptiness_certificate(ctx, Fraction(p, 2 * p + 1), ambient, depth=2,
                                        workers=workers)
        certificates[f"p{p}"] = None if cert is None else cert.to_dict()

    alpha1 = Fraction(1, 3)
    dim1 = rank1_moduli_dim(ctx, sub.dprime, sub.t)
    dim2 = rank1_moduli_dim(ctx, quot.d, quot.k)
    bound0 = stratum_dim_bound(ctx, sub.as_type(), quot, dim1, dim2, ext2=0)
    bound1 = stratum_dim_bound(ctx, sub.as_type(), quot, dim1, dim2, ext2=1)
    beta = brill_noether_number(ctx, ambient)

    profile = margin_sign_profile(ambient, sub, first)
    model = SplitModel(ctx, ((6, 3), (7, 1)))
    model_walls = equal_slope_alphas(model)

    def semistable_at(a):
        v = split_semistable(model, a)
        return {"alpha": format_rational(a), "semistable": v.semistable,
                "violators": [list(s) for s in v.violators]}

    discrepancies = [
        "Segre bound for (m,t)=(1,3): reference value 10-2*alpha; the general "
        "bound m(n-m)(g-1)+(n-1)+alpha(mk-nt) gives 6-2*alpha, which is used here",
        f"stratum dimension: reference value 11; the dimension bound gives "
        f"{bound0} with ext2=0 and {bound1} with ext2=1 (Ext^2 not computed)",
        "quotient type: reference names (1,7,2); t1+t2=4 forces (1,7,1), used here",
        "alpha-slope at the wall: reference writes (13+2*alpha)/2; k=4 gives "
        f"(13+4*alpha)/2 = {format_rational(alpha_slope(ambient, first))} at alpha=1/2",
        "extension positivity: the stated certificate inequality gives "
        f"{ext_positivity(ctx, sub.as_type(), quot)} for ((1,6,3),(1,7,1)) while C21 gives "
        f"{c21(ctx, sub.as_type(), quot)}; both positive",
    ]

    result = {
        "genus": ctx.genus,
        "type": ambient.as_list(),
        "beta": beta,
        "window": window.to_list(),
        "virtual_walls": [w.to_dict() for w in virtual],
        "pruned_walls": [w.to_dict() for w in pruned],
        "first_critical": format_rational(first),
        "chambers": [c.to_dict() for c in partition.chambers],
        "strata_1_3": strata,
        "labels_p1": strata["p1"]["labels"],
        "labels_p2": strata["p2"]["labels"],
        "labels_p3": strata["p3"]["labels"],
        "transfer_check": stability_transfer_check(alpha1, ambient, sub).to_dict(),
        "extension_check": extension_stability_check(alpha1, sub.as_type(), quot).to_dict(),
        "certificates": certificates,
        "certificate": certificates["p1"],
        "dimension": {
            "dim_G_1_6_3": dim1,
            "dim_G_1_7_1": dim2,
            "c21": c21(ctx, sub.as_type(), quot),
            "bound_ext2_0": bound0,
            "bound_ext2_1": bound1,
            "stated": 11,
        },
        "beta_gate": {
            "beta": beta,
            "stratum_dim_bound": bound1,
            "infinite_stratum_nonempty": beta > bound1,
            "remark": f"every component of G_0 has dimension >= beta = {beta} > {bound1}, "
                      "so G_0(2,13,4;1,3;inf) is non-empty",
        },
        "wall_crossing": {
            "sub": sub.as_list(),
            "wall": format_rational(first),
            "profile": [format_sign(s) for s in profile],
            "conclusion": "the (1,6,3) subsystem overtakes the ambient slope above "
                          f"alpha={format_rational(first)}: G_0(2,13,4;1,3;s1) is not "
                          "contained in G_1(2,13,4)",
        },
        "split_model": {
            "model": model.to_dict(),
            "equal_slope_alphas": [
                {"alpha": format_rational(a), "subsets": [list(s) for s in subs]}
                for a, subs in model_walls
            ],
            "semistability": [semistable_at(Fraction(a)) for a in ("1/4", "1/2", "3/4")],
        },
        "discrepancies": discrepancies,
    }
    inputs = {"genus": 6, "general_curve": True, "type": [2, 13, 4],
              "window": window.to_list()}
    return Report("report-g6", inputs, result)
