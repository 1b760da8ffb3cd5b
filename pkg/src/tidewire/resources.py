"""Access to data files shipped inside the package."""

from __future__ import annotations

from importlib import resources


def data_path(name: str):
    """Filesystem path of a shipped data file (templates, lexicons, rules, feeds)."""
    return resources.files("tidewire").joinpath("data", name)
