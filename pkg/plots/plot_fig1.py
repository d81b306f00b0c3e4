#!/usr/bin/env python3
"""Figure 1: reads CLI outputs from --in and writes the image to --out."""

import sys

from renderers import render_density_curves, run_cli

if __name__ == "__main__":
    sys.exit(run_cli(render_density_curves, "One-locus stationary density curves"))
