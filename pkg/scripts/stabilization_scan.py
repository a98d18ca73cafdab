"""Stable cone ranks of the collapse and action maps per truncation, at seeded points."""
import argparse
from dataclasses import dataclass

from floerfam.family_engine import (action_cone_report, build_decorated_yoneda_family, build_local_system_family,
                                    collapse_reports, seeded_points)
from floerfam.fixtures import build_fixture


@dataclass
class ScanConfig:
    fixture: str = "circle"
    points: int = 4
    n_max: int = 3
    seed: int = 0


def scan(cfg: ScanConfig):
    cat, deco = build_fixture(cfg.fixture, cfg.seed)
    fam = build_local_system_family(cat, deco)
    for p in seeded_points(deco.rank, cfg.points, cfg.seed):
        print(f"z = {p}")
        for name, rep in collapse_reports(fam, p, cfg.n_max).items():
            d = rep.as_dict()
            print(f"  collapse {name:<14} n0={d['n0']}  ranks={d['stable_cone_rank']}")
        for obj in cat.objects:
            h = build_decorated_yoneda_family(cat, obj, deco)
            d = action_cone_report(h, fam, p, cfg.n_max).as_dict()
            print(f"  action {obj:<16} n0={d['n0']}  ranks={d['stable_cone_rank']}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fixture", default="circle", choices=("circle", "torus", "random"))
    ap.add_argument("--points", type=int, default=4)
    ap.add_argument("--n-max", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    scan(ScanConfig(a.fixture, a.points, a.n_max, a.seed))
