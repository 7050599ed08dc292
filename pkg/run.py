#!/usr/bin/env python
"""Entry point script for mskit CLI."""

from mskit.cli import main

if __name__ == "__main__":
    main()
