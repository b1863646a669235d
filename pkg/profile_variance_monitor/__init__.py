from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("profile-variance-monitor")
except PackageNotFoundError:
    __version__ = "0.1.0"
