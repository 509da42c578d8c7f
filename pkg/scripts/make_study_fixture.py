#!/usr/bin/env python3
"""Build a demo study directory: case images plus study.json.

Each case gets an H&E-look image and two Sox10-look images (the "traditional"
and "synthetic" pair differ subtly in palette), sized for quick loading in
the review UI.  Usage:

    python scripts/make_study_fixture.py --out /tmp/demo-study --cases 4
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from seamstain.image import RasterImage, save_image


def textured(width: int, height: int, palette: np.ndarray, seed: int) -> RasterImage:
    rng = np.random.default_rng(seed)
    img = palette[rng.integers(0, len(palette), (height, width))].astype(np.float64)
    img += rng.normal(0, 7.0, img.shape)
    yy, xx = np.mgrid[0:height, 0:width]
    img *= (0.92 + 0.08 * np.sin(xx / 37.0) * np.cos(yy / 53.0))[:, :, None]
    return RasterImage(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))


HE_PALETTE = np.array([[225, 160, 200], [190, 120, 180], [140, 90, 160], [240, 210, 230]])
SOX10_TRAD = np.array([[200, 150, 120], [150, 80, 60], [235, 225, 215], [120, 60, 45]])
SOX10_SYNTH = np.array([[205, 148, 118], [148, 82, 64], [238, 226, 212], [118, 62, 48]])


def build(out: Path, n_cases: int, size: int, seed: int, reviewers: list[str]) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    cases = []
    for i in range(n_cases):
        names = {
            "he_image": f"case{i:02d}_he.png",
            "traditional_sox10": f"case{i:02d}_sox10_trad.png",
            "synthetic_sox10": f"case{i:02d}_sox10_synth.png",
        }
        save_image(textured(size, size, HE_PALETTE, seed=seed * 97 + i), out / names["he_image"])
        save_image(
            textured(size, size, SOX10_TRAD, seed=seed * 131 + i),
            out / names["traditional_sox10"],
        )
        save_image(
            textured(size, size, SOX10_SYNTH, seed=seed * 173 + i),
            out / names["synthetic_sox10"],
        )
        cases.append({"case_id": f"case{i:02d}", **names})
    definition = {"cases": cases, "seed": seed, "reviewers": reviewers}
    path = out / "study.json"
    path.write_text(json.dumps(definition, indent=2))
    return path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, type=Path)
    parser.add_argument("--cases", type=int, default=4)
    parser.add_argument("--size", type=int, default=256)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--reviewers", nargs="+", default=["alice", "bob", "carol"])
    args = parser.parse_args()
    path = build(args.out, args.cases, args.size, args.seed, args.reviewers)
    print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
