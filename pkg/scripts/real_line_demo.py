"""Exceptional parameters t along lines z = T^{t alpha} for the torus Floer sheaf and a toy complex."""
import argparse
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from floerfam.family_engine import build_local_system_family
from floerfam.fixtures import build_fixture
from floerfam.sheaf_analysis import AllMinorsZero, complex_from_dict, floer_sheaf, real_line_exceptional_set


@dataclass
class DemoConfig:
    directions: List[str] = field(default_factory=lambda: ["1,0", "0,1", "1,1", "2,-1"])


def toy():
    # a -> b with z1 - T z2, c -> d with z1 z2 - T^3: jumps on two lines
    return complex_from_dict({"ring_rank": 2, "basis": [{"id": x, "degree": k} for x, k in
                                                        (("a", 0), ("c", 0), ("b", 1), ("d", 1))],
                              "d": [{"from": "a", "to": "b", "entry": "z1 - T*z2"},
                                    {"from": "c", "to": "d", "entry": "z1*z2 - T^3"}]})


def main(cfg: DemoConfig):
    cat, deco = build_fixture("torus")
    fam = build_local_system_family(cat, deco)
    for name, C in (("torus M(L1,L1)", floer_sheaf(fam, "L1", "L1")), ("toy", toy())):
        print(name)
        for text in cfg.directions:
            alpha = [Fraction(x) for x in text.split(",")]
            try:
                rep = real_line_exceptional_set(C, alpha)
                print(f"  alpha=({text}): generic {dict(rep.generic_cohomology)}, "
                      f"exceptional t = {[str(t) for t in rep.exceptional]}")
            except AllMinorsZero as exc:
                print(f"  alpha=({text}): generic rank not reached on the line ({exc})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--direction", action="append", help="comma-separated rational direction; repeatable")
    a = ap.parse_args()
    main(DemoConfig(a.direction) if a.direction else DemoConfig())
