"""Regenerate the stored third-moment constant: ``python -m reinforced_ep.calibrate``."""

import argparse
import json
from pathlib import Path

from .oracles import M3_CONSTANT_FILE, calibrate_m3_constant


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--j-max", type=int, default=256)
    ap.add_argument("--n-max", type=int, default=2**20)
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).parent / "data" / M3_CONSTANT_FILE)
    args = ap.parse_args(argv)
    result = calibrate_m3_constant(args.j_max, args.n_max)
    result["note"] = ("sup over birth steps j <= j_max and n in [j, n_max] of the exact "
                      "third moment of a cluster born at step j, divided by (n/j)^1.5")
    args.out.write_text(json.dumps(result, indent=2) + "\n")
    print(json.dumps(result))


if __name__ == "__main__":
    main()
