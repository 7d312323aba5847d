"""Bundled sample program and dataset."""
from importlib import resources


def sample_text(name: str) -> str:
    """Contents of a bundled sample file, e.g. ``sample_text("fig1.tdl")``."""
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def sample_path(name: str):
    return resources.files(__name__).joinpath(name)
