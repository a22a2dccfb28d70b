"""Render figure panels from jcsim CSV output.

Modules:
    style  -- all styling constants (colors, markers, sizes) in one place
    panels -- panel specifications, CSV schema validation, and rendering
    cli    -- the ``jcplot`` command-line entry point
"""

__version__ = "0.1.0"
