"""Access to the models and strategy corpora shipped with the package."""

from __future__ import annotations

import os
from importlib import resources

from .model import Model, load_model

BUILTIN_MODELS = ("rtt", "rtt-idle", "cash-lite")


def _models_dir():
    return resources.files("tstrat") / "models"


def _strategies_dir():
    return resources.files("tstrat") / "strategies"


def builtin_model_text(name: str) -> str:
    if name not in BUILTIN_MODELS:
        raise KeyError(f"unknown builtin model {name!r} "
                       f"(available: {', '.join(BUILTIN_MODELS)})")
    return (_models_dir() / f"{name}.rtmod").read_text(encoding="utf-8")


def builtin_model(name: str) -> Model:
    return load_model(builtin_model_text(name), source=f"{name}.rtmod")


def bundled_strategy_names():
    names = [p.name[:-len(".tstrat")] for p in _strategies_dir().iterdir()
             if p.name.endswith(".tstrat")]
    return sorted(names)


def bundled_strategy_text(name: str) -> str:
    return (_strategies_dir() / f"{name}.tstrat").read_text(encoding="utf-8")


def resolve_model_text(ref: str, env: dict = None) -> tuple:
    """Resolve a --model argument to (source name, file text).

    A path (contains a separator or ends in .rtmod) is read directly; a
    bare name is searched for as NAME.rtmod along TSTRAT_MODEL_PATH, then
    among the builtin models.
    """
    env = os.environ if env is None else env
    if os.sep in ref or ref.endswith(".rtmod"):
        with open(ref, encoding="utf-8") as fh:
            return ref, fh.read()
    search_path = env.get("TSTRAT_MODEL_PATH", "")
    for d in filter(None, search_path.split(os.pathsep)):
        candidate = os.path.join(d, f"{ref}.rtmod")
        if os.path.exists(candidate):
            with open(candidate, encoding="utf-8") as fh:
                return candidate, fh.read()
    if ref in BUILTIN_MODELS:
        return f"{ref}.rtmod", builtin_model_text(ref)
    raise KeyError(f"model {ref!r} not found (no such file, not on "
                   f"TSTRAT_MODEL_PATH, and not a builtin)")
