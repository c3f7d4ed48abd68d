"""
Entry point for running the lab as a module.

Usage:
    python -m card_auth_lab evaluate --seed 0
"""

from . import main

if __name__ == "__main__":
    main()
