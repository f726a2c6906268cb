#!/usr/bin/env python3
"""Check every shipped LPV assertion and compare with the expected verdicts.

Prints one line per assertion and exits non-zero on any mismatch.
"""

from __future__ import annotations

import argparse
import sys
import time

from failprop.checker import check_all
from failprop.lpv import corpus, load_shipped


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-failures", type=int, default=None,
                   help="bound on simultaneous failures (default: exhaustive)")
    args = p.parse_args(argv)

    expected = {(e.model_id, e.assertion): e for e in corpus()}
    mismatches = 0
    started = time.perf_counter()
    for model_id in ("baseline", "hardened"):
        model = load_shipped(model_id)
        for v in check_all(model, workers=args.workers, max_failures=args.max_failures):
            e = expected[model_id, v.assertion]
            ok = v.outcome is e.expected
            mismatches += not ok
            print(f"{'ok ' if ok else 'BAD'} {model_id:<9} {v.assertion:<52} "
                  f"{v.outcome.value:<8} ({e.requirement}, expected {e.expected.value})")
    print(f"{len(expected) - mismatches}/{len(expected)} verdicts as expected "
          f"in {time.perf_counter() - started:.2f}s")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
