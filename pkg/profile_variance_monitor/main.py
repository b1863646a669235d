import sys

from profile_variance_monitor.interface.cli.app import Application


def main() -> None:
    sys.exit(Application().run())


if __name__ == "__main__":
    main()
