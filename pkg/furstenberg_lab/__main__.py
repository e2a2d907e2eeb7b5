"""
Entry point for running furstenberg_lab as a module.
"""

from .cli import main

if __name__ == "__main__":
    main()
