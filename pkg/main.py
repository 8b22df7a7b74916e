import sys

from xorgadget_hub.cli.interface import main

if __name__ == "__main__":
    sys.exit(main())
