"""Reading the JSON input files used by the command line."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from . import matcore
from .contraction import Contraction
from .ensembles import Ensemble
from .errors import InvalidInput
from .measurement import ObservableSpec, PureInstrument, observable_instrument

BUNDLED_PREFIX = "bundled:"


def bundled_names() -> list[str]:
    return sorted(p.name for p in resources.files("infodist.data").iterdir() if p.name.endswith(".json"))


def read_json(path: str) -> dict:
    """Load JSON from a path, or from package data when ``path`` starts with ``bundled:``."""
    if path.startswith(BUNDLED_PREFIX):
        name = path[len(BUNDLED_PREFIX):]
        if name not in bundled_names():
            raise InvalidInput(f"no bundled file {name!r}; available: {', '.join(bundled_names())}")
        text = resources.files("infodist.data").joinpath(name).read_text()
    else:
        text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}: malformed JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise InvalidInput(f"{path}: expected a JSON object")
    return data


def load_ensemble(path: str) -> Ensemble:
    return Ensemble.from_json(read_json(path))


def contraction_from_json(data: dict, tol_rank: float = matcore.RANK_TOL) -> Contraction:
    if "matrix" not in data:
        raise InvalidInput("contraction file needs a 'matrix' entry")
    m = Contraction(matcore.matrix_from_json(data["matrix"]), tol_rank)
    if "dim" in data and int(data["dim"]) != m.dim:
        raise InvalidInput(f"declared dim {data['dim']} does not match matrix ({m.dim})")
    return m


def load_contraction(path: str, tol_rank: float = matcore.RANK_TOL) -> Contraction:
    return contraction_from_json(read_json(path), tol_rank)


def load_measurement(path: str, tol_rank: float = matcore.RANK_TOL) -> tuple[list[str], list[Contraction], bool]:
    """Read a single contraction, an instrument or an observable spec.

    Returns:
        ``(labels, contractions, complete)`` where ``complete`` says the
        outcomes form a complete instrument.
    """
    data = read_json(path)
    if "cond_prob" in data:
        inst = observable_instrument(ObservableSpec.from_json(data))
    elif "outcomes" in data:
        inst = PureInstrument.from_json(data)
    else:
        return ["0"], [contraction_from_json(data, tol_rank)], False
    return list(inst.labels), list(inst.outcomes), True


def load_spec(path: str) -> ObservableSpec:
    return ObservableSpec.from_json(read_json(path))
