#!/usr/bin/env python3
"""
Command-line entry point for the reflection and metric toolkit
"""
import sys
from pathlib import Path

# Add the app directory to Python path
sys.path.append(str(Path(__file__).parent))

from app.cli import main

if __name__ == "__main__":
    sys.exit(main())
