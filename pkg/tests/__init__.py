"""Tests for lamtransfer.

The repo root goes on sys.path so the suite runs from a plain checkout.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))
