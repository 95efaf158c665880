"""Benchmark environments and the registry used by configs and the CLI."""

from __future__ import annotations

from importlib import resources

from .base import Env, EnvStep
from .four_rooms import FourRoomsEnv
from .grid3 import Grid3Env
from .taxi import TaxiEnv

__all__ = ["Env", "EnvStep", "FourRoomsEnv", "Grid3Env", "TaxiEnv", "make", "ENV_IDS"]

ENV_IDS = ("four_rooms", "taxi", "grid3")


def _data(filename: str) -> str:
    return (resources.files(__package__) / "data" / filename).read_text()


def make(env_id: str, **options) -> Env:
    """Build an environment by id.

    four_rooms options: map_text or map_path, danger_terminal (default True).
    taxi options: instance_text or instance_path.
    """
    if env_id == "four_rooms":
        text = options.pop("map_text", None)
        path = options.pop("map_path", None)
        if text is None:
            text = open(path).read() if path else _data("four_rooms.map")
        return FourRoomsEnv(text, **options)
    if env_id == "taxi":
        text = options.pop("instance_text", None)
        path = options.pop("instance_path", None)
        if text is None:
            text = open(path).read() if path else _data("taxi.instance")
        return TaxiEnv(text, **options)
    if env_id == "grid3":
        if options:
            raise ValueError(f"grid3 takes no options, got {options}")
        return Grid3Env()
    raise ValueError(f"unknown environment id {env_id!r}; known: {ENV_IDS}")


def scenario_text(env_id: str, intent: str) -> str:
    """Shipped feedback-scenario file for (env, intent)."""
    return _data(f"scenarios/{env_id}_{intent}.scn")
