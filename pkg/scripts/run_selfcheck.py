#!/usr/bin/env python3
"""Run the full nine-criterion acceptance suite and print one line each.

Equivalent to ``qpade selfcheck``; exits 1 if any criterion fails.

    python3 scripts/run_selfcheck.py [--a21-paper-literal]
"""

from __future__ import annotations

import sys

from qpade.cli import main

if __name__ == "__main__":
    sys.exit(main(["selfcheck", *sys.argv[1:]]))
