#!/usr/bin/env python3
"""Regenerate the bundled starter corpus from publicly licensed colormaps.

Sources: matplotlib's built-in sequential colormaps (matplotlib license,
BSD-compatible; includes the ColorBrewer sequential schemes, Apache 2.0),
seaborn's sequential colormaps (BSD-3), and parametric cubehelix ramps.
Each ramp is sampled at 256 points, converted to Lab, resampled to 9
CIEDE2000-equidistant control points, and kept only if strictly monotone
in lightness at that resolution.

Run from the repo root:  python3 tools/build_starter_corpus.py
"""

import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import seaborn as sns

from cmapsmith.colorspace import srgb_to_lab_array
from cmapsmith.corpus import Corpus, ExpertColormap, resample_to_nine, save_corpus

MPL_NAMES = [
    "viridis", "plasma", "inferno", "magma", "cividis",
    "Blues", "BuGn", "BuPu", "GnBu", "Greens", "Greys", "OrRd", "Oranges",
    "PuBu", "PuBuGn", "PuRd", "Purples", "RdPu", "Reds", "YlGn", "YlGnBu",
    "YlOrBr", "YlOrRd",
    "gray", "bone", "pink", "copper", "hot", "afmhot", "gist_heat",
    "cubehelix", "Wistia", "summer", "autumn", "winter", "CMRmap",
    "gnuplot2", "gist_earth",
]
SNS_NAMES = ["rocket", "mako", "flare", "crest"]
# (start, rot) grid covering the hue wheel with varied twist; dark=0.08,
# light=0.92. The corpus aims for the scale of public colormap galleries
# (~200 ramps) so the color graph stays combinatorially rich.
CUBEHELIX_PARAMS = [
    (s / 4.0, rot)
    for s in range(12)
    for rot in (-0.9, -0.7, -0.5, -0.35, -0.15, 0.15, 0.35, 0.5, 0.7, 0.9)
]
# white-to-color and near-black-to-color ramps across the hue wheel
RAMP_HEXES = [
    "#B22222", "#C86428", "#B8860B", "#6B8E23", "#2E8B57", "#20808D",
    "#3A6EA5", "#4169E1", "#6A5ACD", "#8B4B8B", "#B03060", "#8B3A3A",
    "#D2691E", "#228B22", "#008B8B", "#483D8B", "#A52A2A", "#CC5500",
    "#4682B4", "#556B2F", "#7B68EE", "#C71585", "#2F4F4F", "#8B008B",
]


def ramp_to_points(cmap) -> np.ndarray:
    rgb = np.asarray([cmap(x)[:3] for x in np.linspace(0, 1, 256)])
    lab = srgb_to_lab_array(rgb)
    return resample_to_nine(lab)


def monotone(points: np.ndarray) -> bool:
    dL = np.diff(points[:, 0])
    return bool(np.all(dL > 1e-9) or np.all(dL < -1e-9))


def main():
    entries = []

    for name in MPL_NAMES:
        pts = ramp_to_points(plt.get_cmap(name))
        if not monotone(pts):
            print(f"skip {name}: L not monotone")
            continue
        entries.append((name, f"matplotlib colormap '{name}'", pts))

    for name in SNS_NAMES:
        pts = ramp_to_points(sns.color_palette(name, as_cmap=True))
        if not monotone(pts):
            print(f"skip seaborn {name}: L not monotone")
            continue
        entries.append((name, f"seaborn colormap '{name}'", pts))

    for start, rot in CUBEHELIX_PARAMS:
        cmap = sns.cubehelix_palette(
            start=start, rot=rot, dark=0.08, light=0.92, as_cmap=True
        )
        pts = ramp_to_points(cmap)
        if not monotone(pts):
            print(f"skip cubehelix({start},{rot}): L not monotone")
            continue
        entries.append(
            (
                f"cubehelix-s{start:g}-r{rot:g}",
                f"cubehelix ramp (start={start}, rot={rot})",
                pts,
            )
        )

    for hx in RAMP_HEXES:
        for kind, maker in (("light", sns.light_palette), ("dark", sns.dark_palette)):
            pts = ramp_to_points(maker(hx, as_cmap=True))
            if not monotone(pts):
                print(f"skip {kind}_palette({hx}): L not monotone")
                continue
            entries.append(
                (
                    f"{kind}-{hx.lstrip('#').lower()}",
                    f"seaborn {kind}_palette('{hx}')",
                    pts,
                )
            )

    colormaps = []
    for cm_id, source, pts in entries:
        if pts[0, 0] < pts[-1, 0]:
            pts = pts[::-1].copy()
        colormaps.append(ExpertColormap(id=cm_id, source=source, points=pts))

    corp = Corpus(name="starter", colormaps=tuple(colormaps))
    out = Path(__file__).resolve().parents[1] / "src/cmapsmith/data/starter_corpus.json"
    save_corpus(corp, out)
    print(f"wrote {len(colormaps)} colormaps to {out}")


if __name__ == "__main__":
    main()
