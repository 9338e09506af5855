"""Readers for ensemble, puncturing and channel descriptions."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .channel import BEC, BIAWGN, BSC, ChannelModel, ebno_db_to_sigma
from .degree import Ensemble
from .errors import ValidationError
from .parallel import IntentionalPuncturing, RandomPuncturing


def _number(x) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ValidationError(f"not a number: {x!r}") from None
    if not math.isfinite(v):
        raise ValidationError(f"not a finite number: {x!r}")
    return v


def _pairs(raw, what: str) -> list[tuple[int, float]]:
    if not isinstance(raw, list):
        raise ValidationError(f"{what} must be a list of [degree, weight] pairs")
    out = []
    for item in raw:
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise ValidationError(f"{what} entries must be [degree, weight] pairs, got {item!r}")
        d = _number(item[0])
        if d != int(d):
            raise ValidationError(f"{what} degree {item[0]!r} is not an integer")
        out.append((int(d), _number(item[1])))
    return out


def ensemble_from_dict(data: dict) -> Ensemble:
    if not isinstance(data, dict) or "lambda" not in data or "rho" not in data:
        raise ValidationError("ensemble needs 'lambda' and 'rho' entries")
    perspective = data.get("perspective", "edge")
    return Ensemble.from_pairs(_pairs(data["lambda"], "lambda"), _pairs(data["rho"], "rho"), perspective)


def puncturing_from_dict(data: dict | None):
    if data is None:
        return None
    if not isinstance(data, dict):
        raise ValidationError("puncturing spec must be a JSON object")
    kind = data.get("type")
    if kind == "intentional":
        return IntentionalPuncturing.from_mapping(_pairs(data.get("pi", []), "pi"))
    if kind == "random":
        return RandomPuncturing(_number(data.get("alpha")), _number(data.get("p_pct")))
    raise ValidationError(f"unknown puncturing type {kind!r}")


def puncturing_to_dict(p) -> dict | None:
    if p is None:
        return None
    if isinstance(p, RandomPuncturing):
        return {"type": "random", "alpha": p.alpha, "p_pct": p.p_pct}
    return {"type": "intentional", "pi": [list(t) for t in p.pi]}


def read_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError:
        raise  # surfaced as an I/O failure by the caller
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def load_ensemble(path: str | Path) -> Ensemble:
    data = read_json(path)
    # table fixtures wrap the ensemble together with their patterns
    if isinstance(data, dict) and "ensemble" in data:
        data = data["ensemble"]
    return ensemble_from_dict(data)


def load_patterns(path: str | Path) -> list:
    data = read_json(path)
    if isinstance(data, dict):
        data = data.get("patterns")
    if not isinstance(data, list):
        raise ValidationError("patterns file must hold a list (or an object with a 'patterns' list)")
    return [puncturing_from_dict(p) for p in data]


@dataclass(frozen=True)
class TableFixture:
    name: str
    ensemble: Ensemble
    patterns: list
    reference: dict
    notes: list


def table_fixture(name: str) -> TableFixture:
    """Bundled ensemble and puncturing patterns (``table1``, ``table2``, ``table3``)."""
    try:
        text = resources.files("ldpcb").joinpath("fixtures", f"{name}.json").read_text()
    except FileNotFoundError:
        raise ValidationError(f"no bundled fixture named {name!r}") from None
    data = json.loads(text)
    return TableFixture(
        data["name"],
        ensemble_from_dict(data["ensemble"]),
        [puncturing_from_dict(p) for p in data["patterns"]],
        data.get("reference", {}),
        data.get("notes", []),
    )


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("ldpcb").joinpath("fixtures", f"{name}.json")))


def parse_channel(spec: str) -> ChannelModel:
    """Parse ``bec:eps=0.4``, ``bsc:w=0.11``, ``biawgn:sigma=0.978`` or
    ``biawgn:ebno_db=0.187,rate=0.5``."""
    family, _, rest = spec.partition(":")
    params: dict[str, float] = {}
    for part in filter(None, rest.split(",")):
        key, eq, val = part.partition("=")
        if not eq:
            raise ValidationError(f"channel parameter {part!r} is not key=value")
        params[key.strip()] = _number(val)
    family = family.strip().lower()
    try:
        if family == "bec":
            return BEC(params["eps"])
        if family == "bsc":
            return BSC(params["w"])
        if family == "biawgn":
            if "sigma" in params:
                return BIAWGN(params["sigma"])
            return BIAWGN(ebno_db_to_sigma(params["ebno_db"], params["rate"]))
    except KeyError as exc:
        raise ValidationError(f"channel spec {spec!r} is missing {exc.args[0]!r}") from None
    raise ValidationError(f"unknown channel family in {spec!r}")
