"""Put the repository root on sys.path so ``app`` and ``lib`` import from tests/."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
