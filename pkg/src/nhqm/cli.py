"""Console entry point; all logic lives in ``nhqm.model_io``."""
import sys

from .model_io import run_cli


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
