#!/usr/bin/env python3
"""Classify nonlinearities f(u) and list their point-symmetry generators.

Each row gives the case, extracted parameters and the worst scaled defect
of the emitted generators. Extra expressions may be passed as arguments:

    python3 scripts/symmetry_table.py "u^2" "1 + 4*exp(-u)" "cos(u)"
"""

import argparse
import json

from gkdv import classify as cl

DEFAULT = [
    ("1", (-1, 1)),
    ("u", (-1, 1)),
    ("u^2", (-1, 1)),
    ("2 + u^3", (-1, 1)),
    ("0.5 + 2*(u + 3)^2.5", (-1, 1)),
    ("1 + exp(2*u)", (-1, 1)),
    ("3*log(u-1)", (1.5, 3)),
    ("sin(u)", (-1, 1)),
    ("1 + u^2", (-1, 1)),
]


def row(text, dom):
    d = cl.DomainInterval(*dom)
    res = cl.classify(text, d)
    scale = cl.defect_scale(text, d)
    worst = max(cl.verify_generator(text, g, d) / scale for g in res.generators)
    return res, worst


def main():
    ap = argparse.ArgumentParser(description="point-symmetry table for u_t = f(u) u_x + u_xxx")
    ap.add_argument("exprs", nargs="*", help="extra f(u), sampled on [-1, 1]")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    items = DEFAULT + [(e, (-1, 1)) for e in args.exprs]
    out = []
    for text, dom in items:
        res, worst = row(text, dom)
        out.append({"f": text, "case": res.case_tag, "params": res.params,
                    "generators": [g.describe() for g in res.generators], "worst_defect": worst})
    if args.json:
        print(json.dumps(out, indent=2))
        return
    for r in out:
        params = ", ".join(f"{k}={v:.6g}" for k, v in sorted(r["params"].items()))
        print(f"{r['f']:<22} {r['case']:<9} {params}")
        for i, g in enumerate(r["generators"]):
            print(f"{'':<22}   X{i + 1} = {g}")
        print(f"{'':<22}   worst defect {r['worst_defect']:.1e}")


if __name__ == "__main__":
    main()
