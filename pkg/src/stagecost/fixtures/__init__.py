"""Bundled sample data: server elapsed-time records and carrier delay records."""

from importlib.resources import files


def path(name: str):
    """Filesystem path of a bundled CSV (``servers.csv`` or ``delays.csv``)."""
    return files(__package__).joinpath(name)
