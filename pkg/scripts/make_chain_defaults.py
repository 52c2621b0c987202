"""Regenerate src/antoine/data/chain_defaults.json.

For each tabulated parent ratio r/R, search for the smallest even q that
admits a verified simple chain and record the best-slack parameters.
"""

import argparse
import json
import logging
from pathlib import Path

from antoine.necklace import search_chain_params

RATIOS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
OUT = Path(__file__).resolve().parents[1] / "src" / "antoine" / "data" / "chain_defaults.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ratios", type=float, nargs="*", default=RATIOS)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO)
    rows = []
    for ratio in args.ratios:
        p = search_chain_params(ratio)
        rows.append({"ratio": ratio, "q": p.q, "child_major_scale": p.child_major_scale,
                     "child_minor_ratio": p.child_minor_ratio})
        print(rows[-1])
    doc = {"version": 1,
           "note": "derived by scripts/make_chain_defaults.py; not taken from any source",
           "entries": rows}
    args.out.write_text(json.dumps(doc, indent=1) + "\n")


if __name__ == "__main__":
    main()
