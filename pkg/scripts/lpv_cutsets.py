#!/usr/bin/env python3
"""Minimal cut sets for loss of LPV guidance on the baseline and hardened models.

The condition is "every display shows OK guidance".  A single function whose
failure breaks it, for every pilot selection, is a single point of failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from failprop.checker import minimal_cutsets
from failprop.dsl import parse_condition
from failprop.lpv import load_shipped

CONDITION = "oSelected1.status = OK and oSelected2.status = OK and oSelected3.status = OK"


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--any-valuation", action="store_true",
                   help="count failures that break the condition for some pilot selection")
    p.add_argument("--json", action="store_true")
    args = p.parse_args(argv)

    report = {}
    for model_id in ("baseline", "hardened"):
        model = load_shipped(model_id)
        cond = parse_condition(CONDITION, model)
        sets = minimal_cutsets(model, cond, args.order, every_valuation=not args.any_valuation)
        report[model_id] = [str(c) for c in sets]
        if not args.json:
            singles = [str(c) for c in sets if c.order == 1]
            print(f"{model_id}: {len(sets)} minimal cut set(s) up to order {args.order}")
            print(f"  single points of failure: {', '.join(singles) or 'none'}")
            lpv_loss = [s for s in singles if s.startswith("{ComputeLPV")]
            print(f"  ComputeLPV loss alone breaks guidance: {'yes' if lpv_loss else 'no'}")
    if args.json:
        json.dump(report, sys.stdout, indent=2)
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
