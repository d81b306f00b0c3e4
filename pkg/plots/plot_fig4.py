#!/usr/bin/env python3
"""Figure 4: reads CLI outputs from --in and writes the image to --out."""

import sys

from renderers import render_landscape, run_cli

if __name__ == "__main__":
    sys.exit(run_cli(render_landscape, "Two-locus stationary density landscape with critical points"))
