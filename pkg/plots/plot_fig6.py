#!/usr/bin/env python3
"""Figure 6: reads CLI outputs from --in and writes the image to --out."""

import sys

from renderers import render_trajectory, run_cli

if __name__ == "__main__":
    sys.exit(run_cli(render_trajectory, "Colour-segmented allelic-frequency trajectory"))
