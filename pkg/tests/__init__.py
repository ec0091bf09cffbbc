"""
Test package initialization.
"""

from pathlib import Path
import sys

# Add the project root to Python path so tests can import src and soilmap_cli
root_path = Path(__file__).parent.parent
sys.path.insert(0, str(root_path))
