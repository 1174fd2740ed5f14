"""Bundled sample rulesets, fix suggestions, and canned mock responses."""

from importlib import resources


def fixture_text(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def fixture_path(name: str):
    return resources.files(__package__).joinpath(name)
