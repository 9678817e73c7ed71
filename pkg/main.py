import sys

from ebus3d.cli.app import main

if __name__ == "__main__":
    sys.exit(main())
