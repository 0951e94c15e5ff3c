"""The installed distribution version, reported by `aptree --version` and in run reports."""

from importlib.metadata import PackageNotFoundError, version

DISTRIBUTION = "aptree"


def installed_version(distribution: str = DISTRIBUTION) -> str:
    """The version of `distribution`, or "0.0.0" for a source checkout that was never installed."""
    try:
        return version(distribution)
    except PackageNotFoundError:
        return "0.0.0"


__version__ = installed_version()
