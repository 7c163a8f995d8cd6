"""Bundled geometry and scene files (installed package data)."""

from importlib import resources


def data_path(name: str):
    """Filesystem path of a bundled data file."""
    return resources.files("pantosim").joinpath("data", name)


def default_geometry_path():
    """Device geometry solved from the published workspace numbers."""
    return data_path("geometry_default.json")


def study_bundle(table: str):
    """(scene_path, geometry_path) for the bundled wiping-task scenes.

    ``table`` is "093" (0.93 m table) or "125" (1.25 m table).  The study
    geometries share the default reach and solid angle but split the
    direction sector wider in azimuth so a fixed base can reach the whole
    0.6 x 0.3 m table; the base height differs per scene.
    """
    if table not in ("093", "125"):
        raise ValueError(f"unknown study table {table!r}; use '093' or '125'")
    return (
        data_path(f"scene_table_{table}.json"),
        data_path(f"geometry_study_{table}.json"),
    )
