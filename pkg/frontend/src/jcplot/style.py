"""Styling constants pinned in one place so figure changes are reviewable.

Convention throughout: solid lines show evolution without the
counter-diabatic drive, circle markers show evolution with it.
"""

# series colors, cycled in column order
COLORS = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#e377c2",
]

LINE_WIDTH = 1.6
MARKER = "o"
MARKER_SIZE = 4.5
MARKER_EVERY_FRACTION = 0.04  # show roughly 25 circles along a dense trace
GROUND_LINESTYLE = "--"
ERRORBAR_CAPSIZE = 3.0

FIGSIZE_SINGLE = (5.2, 3.6)
FIGSIZE_PER_EXTRA_PANEL = 4.6  # added width per additional CSV subplot
DPI = 150
FONT_SIZE = 10
LEGEND_FONT_SIZE = 8

# floor applied to non-positive values before log-scale plotting
LOG_CLIP = 1e-16

# fixed PNG metadata so identical inputs give identical bytes
PNG_METADATA = {"Software": "jcplot"}
