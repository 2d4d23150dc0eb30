#!/usr/bin/env python3
"""Property checker for t02_param.mc: the output is exactly ['9002', '9002']."""
import os
import sys

from mcreduce import run_source

path = os.environ.get("DRR_CANDIDATE", "candidate.mc")
with open(path, encoding="utf-8") as handle:
    outcome = run_source(handle.read(), fuel=200_000)
sys.exit(0 if outcome.output.splitlines() == ['9002', '9002'] else 1)
