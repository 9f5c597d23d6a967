#!/usr/bin/env python3
"""Sweep the gallery through the equivalence harness and write one JSON
report per element into reports/."""

import argparse
import json
import pathlib

from cstarreg import gallery, gridalg, harness

SWEEPS = {
    "const-unitary": (0.0, [0.1, 0.3, 0.6]),
    "linear": (0.0, [0.1, 0.3, 0.6]),
    "osc": (0.0, [0.05, 0.1, 0.2, 0.5]),
    "rankdrop": (0.0, [0.1, 0.3, 0.6]),
    "disk-z": (0.9, [0.95]),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gridN", type=int, default=256)
    ap.add_argument("--outdir", default="reports")
    args = ap.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, (gamma, deltas) in SWEEPS.items():
        n = args.gridN if name != "disk-z" else max(32, args.gridN // 4)
        ge = gallery.gallery(name, n)
        rep = harness.check_equivalences(ge, gamma, deltas, element_name=name)
        path = outdir / f"{name}.json"
        with open(path, "w") as fh:
            json.dump(rep.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        lo, up = rep.cond1
        print(f"{name:14s} verdict={rep.verdict:12s} dist=[{lo:.4f}, {up:.4f}] "
              f"sup={gridalg.sup_norm(ge):.3f} -> {path}")


if __name__ == "__main__":
    main()
