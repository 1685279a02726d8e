# run.py
import sys

from src.main import main

if __name__ == "__main__":
    # Run from the repository root so the `src` package resolves.
    sys.exit(main())
