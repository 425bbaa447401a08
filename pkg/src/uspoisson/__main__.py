"""Make the package executable with python -m uspoisson."""
# Created: 2026-10-18

from .cli import main

if __name__ == '__main__':
    main()
