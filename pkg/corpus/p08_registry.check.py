#!/usr/bin/env python3
"""Property checker for p08_registry.mc: the program still prints the 9208 line."""
import os
import sys

from mcreduce import run_source

path = os.environ.get("DRR_CANDIDATE", "candidate.mc")
with open(path, encoding="utf-8") as handle:
    outcome = run_source(handle.read(), fuel=200_000)
sys.exit(0 if "9208" in outcome.output.splitlines() else 1)
