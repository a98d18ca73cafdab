"""Run the acceptance criteria and write one JSON report per criterion."""
import argparse
import os
import sys
from dataclasses import fields

from floerfam.acceptance import AcceptanceConfig, run_all


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="acceptance-reports")
    for f in fields(AcceptanceConfig):
        if f.type in (int, float, "int", "float"):
            ap.add_argument("--" + f.name.replace("_", "-"), type=float if f.type in (float, "float") else int,
                            default=f.default)
    args = ap.parse_args(argv)
    cfg = AcceptanceConfig(**{f.name: getattr(args, f.name) for f in fields(AcceptanceConfig)
                              if hasattr(args, f.name)})
    os.makedirs(args.out, exist_ok=True)
    ok = True
    for r in run_all(cfg):
        with open(os.path.join(args.out, f"criterion-{r.number:02d}.json"), "w", encoding="utf-8") as fh:
            fh.write(r.dumps() + "\n")
        print(f"{r.line()}  ({r.seconds:.2f} s)")
        ok = ok and r.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
