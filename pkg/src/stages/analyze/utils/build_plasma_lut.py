"""Regenerate data/plasma_lut.json from matplotlib's plasma colormap.

Usage (from repo root):
    python -m src.stages.analyze.utils.build_plasma_lut
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np
from matplotlib import colormaps

OUT = Path(__file__).resolve().parent.parent / "data" / "plasma_lut.json"


def build_entries(name: str = "plasma", n: int = 256) -> list[list[int]]:
    rgba = colormaps[name].resampled(n)(np.arange(n))
    return np.floor(rgba[:, :3] * 255 + 0.5).astype(int).tolist()


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", type=Path, default=OUT)
    args = parser.parse_args()
    doc = {
        "name": "plasma",
        "source": "matplotlib.cm.plasma, 256 entries, rounded to 8 bits",
        "entries": build_entries(),
    }
    lines = ",\n".join(f"    [{r}, {g}, {b}]" for r, g, b in doc["entries"])
    args.out.write_text(
        "{\n"
        f'  "name": {json.dumps(doc["name"])},\n'
        f'  "source": {json.dumps(doc["source"])},\n'
        f'  "entries": [\n{lines}\n  ]\n'
        "}\n",
        encoding="utf-8",
    )
    print(f"Wrote:\n  {args.out}")


if __name__ == "__main__":
    main()
