"""Scenario documents: loading, schema checks and bundled datasets."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .eoq import EoqParams, FuzzyEoqParams
from .errors import ConfigurationError, SurvoptError
from .horizon import HorizonParams
from .stats import AttributeSummary, SrsSummary, StratifiedPopulation

KINDS = ("stratified", "srs", "attribute", "fuzzy-eoq", "horizon")


class SchemaError(ConfigurationError):
    """A scenario document does not match its schema; ``path`` locates the field."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class Scenario:
    kind: str
    payload: Mapping[str, Any]
    label: str = ""


@dataclass(frozen=True)
class EoqScenario:
    crisp: EoqParams
    fuzzy: FuzzyEoqParams


def data_path(name: str) -> Path:
    """Path of a bundled data file."""
    return Path(str(resources.files("survopt") / "data" / name))


def load_scenario(source: str | Path | Mapping[str, Any]) -> Scenario:
    if isinstance(source, Mapping):
        doc = dict(source)
    elif not isinstance(source, (str, Path)):
        raise SchemaError("$", "document must be an object")
    else:
        try:
            doc = json.loads(Path(source).read_text())
        except FileNotFoundError:
            raise SchemaError("$", f"file not found: {source}") from None
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("$", "document must be an object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SchemaError("$.kind", f"expected one of {KINDS}, got {kind!r}")
    payload = doc.get("payload")
    if not isinstance(payload, dict):
        raise SchemaError("$.payload", "must be an object")
    return Scenario(kind, payload, str(doc.get("label", "")))


def load_bundled(name: str) -> Scenario:
    return load_scenario(data_path(name))


def _build(path: str, fn, payload):
    try:
        return fn(payload)
    except SchemaError:
        raise
    except (SurvoptError, TypeError, KeyError, ValueError) as exc:
        raise SchemaError(path, str(exc)) from None


def build_model(sc: Scenario):
    """Domain object described by a scenario."""
    p = sc.payload
    if sc.kind == "stratified":
        strata = p.get("strata")
        if not isinstance(strata, list):
            raise SchemaError("$.payload.strata", "must be a list")
        for i, s in enumerate(strata):
            _build(f"$.payload.strata[{i}]", lambda d: StratifiedPopulation.from_dict({"strata": [d]}), s)
        return _build("$.payload", StratifiedPopulation.from_dict, p)
    if sc.kind == "srs":
        return _build("$.payload", SrsSummary.from_dict, p)
    if sc.kind == "attribute":
        return _build("$.payload", AttributeSummary.from_dict, p)
    if sc.kind == "horizon":
        return _build("$.payload", HorizonParams.from_dict, p)
    if sc.kind == "fuzzy-eoq":
        return _build_eoq(p)
    raise SchemaError("$.kind", f"unsupported kind {sc.kind!r}")


def _build_eoq(p: Mapping[str, Any]) -> EoqScenario:
    for key in ("crisp", "fuzzy", "ct"):
        if key not in p:
            raise SchemaError(f"$.payload.{key}", "missing")
    ct, ct_star = p["ct"], p.get("ct_star")
    crisp = _build("$.payload.crisp", lambda d: EoqParams.from_dict({**d, "Ct": ct, "Ct_star": ct_star}), p["crisp"])
    fuzzy = _build("$.payload.fuzzy", lambda d: FuzzyEoqParams.from_dict({**d, "Ct": ct, "Ct_star": ct_star}), p["fuzzy"])
    return EoqScenario(crisp, fuzzy)
