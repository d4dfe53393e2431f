#!/usr/bin/env python3
"""Run the acceptance suite and print one PASS/FAIL line per criterion."""
import sys
from pathlib import Path

import pytest

if __name__ == "__main__":
    target = Path(__file__).resolve().parent.parent / "tests" / "test_acceptance.py"
    sys.exit(pytest.main(["-s", "-v", str(target)] + sys.argv[1:]))
