import sys
from pathlib import Path

# tests import the frozen-oracle module that lives next to them
sys.path.insert(0, str(Path(__file__).parent))
