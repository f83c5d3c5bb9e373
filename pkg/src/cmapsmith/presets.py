"""Preset seed colors offered as swatches and swept by the acceptance suite.

Ten categorical-palette colors chosen so that corpus alignment keeps a
healthy candidate set and a searchable graph for every entry.
"""

PRESET_SEEDS = [
    "#4E79A7",  # blue
    "#F28E2B",  # orange
    "#E15759",  # red
    "#76B7B2",  # teal
    "#59A14F",  # green
    "#EDC948",  # yellow
    "#B07AA1",  # purple
    "#FF9DA7",  # pink
    "#9C755F",  # brown
    "#BAB0AC",  # gray
]
