"""JSON model documents.

Schema::

    {
      "name": "scalar",                      # optional
      "n": 1,
      "d": [signal, ...],                    # n
      "a": [[signal, ...], ...],             # n x n
      "kernels": [[kernel, ...], ...],       # n x n
      "tau": [[signal, ...], ...],           # n x n
      "inputs": [signal, ...],               # n
      "activations": {"g": act | [act], "f": act | [act]},
      "history": {"kind": "constant", "value": [...]}   # optional
    }

    signal  = number | {"offset": x, "terms": [{"amp": a, "freq": w, "phase": p}]}
    kernel  = {"atoms": [{"lag": s, "weight": signal}],
               "densities": [{"coefficient": signal, "p": c, "q": k, "lambda": l}]}
    act     = {"kind": "tanh"|"pwl"|"linear"|"table", "lipschitz": G,
               "monotone": bool, "slope": x, "offset": x,
               "table_x": [...], "table_y": [...]}
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ModelError
from .history import HistoryFunction, signal_to_dict
from .model import (ActivationSpec, Atom, DelayKernel, Density, NetworkModel,
                    QuasiPeriodicSignal)

__all__ = ["ModelFormatError", "model_from_dict", "model_to_dict", "load_model", "save_model"]


class ModelFormatError(ModelError):
    """Model document does not follow the schema; the message names the field."""


def _require(doc, key, where):
    if not isinstance(doc, dict) or key not in doc:
        raise ModelFormatError(f"{where}: missing field '{key}'")
    return doc[key]


def _signal(x, where) -> QuasiPeriodicSignal:
    if isinstance(x, bool):
        raise ModelFormatError(f"{where}: expected number or signal object")
    if isinstance(x, (int, float)):
        return QuasiPeriodicSignal.constant(x)
    if not isinstance(x, dict):
        raise ModelFormatError(f"{where}: expected number or signal object")
    terms = []
    for k, term in enumerate(x.get("terms", [])):
        w = f"{where}.terms[{k}]"
        try:
            terms.append((float(_require(term, "amp", w)), float(_require(term, "freq", w)),
                          float(term.get("phase", 0.0))))
        except (TypeError, ValueError) as exc:
            raise ModelFormatError(f"{w}: {exc}") from None
    try:
        return QuasiPeriodicSignal(float(x.get("offset", 0.0)), tuple(terms))
    except (ModelError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{where}: {exc}") from None


def _vector(doc, key, n, conv, where="model"):
    vals = _require(doc, key, where)
    if not isinstance(vals, list) or len(vals) != n:
        raise ModelFormatError(f"{where}.{key}: expected list of length {n}")
    return [conv(v, f"{where}.{key}[{i}]") for i, v in enumerate(vals)]


def _matrix(doc, key, n, conv, where="model"):
    rows = _require(doc, key, where)
    if not isinstance(rows, list) or len(rows) != n:
        raise ModelFormatError(f"{where}.{key}: expected {n} rows")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ModelFormatError(f"{where}.{key}[{i}]: expected {n} entries")
        out.append([conv(v, f"{where}.{key}[{i}][{j}]") for j, v in enumerate(row)])
    return out


def _kernel(x, where) -> DelayKernel:
    if x is None or x == 0:
        return DelayKernel()
    if not isinstance(x, dict):
        raise ModelFormatError(f"{where}: expected kernel object")
    try:
        atoms = [Atom(float(_require(a, "lag", f"{where}.atoms[{k}]")),
                      _signal(_require(a, "weight", f"{where}.atoms[{k}]"),
                              f"{where}.atoms[{k}].weight"))
                 for k, a in enumerate(x.get("atoms", []))]
        dens = []
        for k, d in enumerate(x.get("densities", [])):
            w = f"{where}.densities[{k}]"
            dens.append(Density(_signal(_require(d, "coefficient", w), f"{w}.coefficient"),
                                int(d.get("q", 0)), float(d.get("p", 1.0)),
                                float(_require(d, "lambda", w))))
    except ModelFormatError:
        raise
    except (ModelError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{where}: {exc}") from None
    return DelayKernel(tuple(atoms), tuple(dens))


def _activation(x, where) -> ActivationSpec:
    if not isinstance(x, dict):
        raise ModelFormatError(f"{where}: expected activation object")
    try:
        return ActivationSpec(kind=x.get("kind", "tanh"),
                              lipschitz_bound=float(_require(x, "lipschitz", where)),
                              requires_monotone=bool(x.get("monotone", True)),
                              slope=float(x.get("slope", 1.0)),
                              offset=float(x.get("offset", 0.0)),
                              table_x=tuple(x.get("table_x", ())),
                              table_y=tuple(x.get("table_y", ())))
    except ModelFormatError:
        raise
    except (ModelError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{where}: {exc}") from None


def _activations(doc, key, n):
    acts = _require(_require(doc, "activations", "model"), key, "model.activations")
    where = f"model.activations.{key}"
    if isinstance(acts, dict):
        return [_activation(acts, where)] * n
    if not isinstance(acts, list) or len(acts) != n:
        raise ModelFormatError(f"{where}: expected object or list of length {n}")
    return [_activation(a, f"{where}[{j}]") for j, a in enumerate(acts)]


def _history(x, n) -> HistoryFunction:
    where = "model.history"
    if not isinstance(x, dict):
        raise ModelFormatError(f"{where}: expected object")
    kind = x.get("kind", "constant")
    window = float(x.get("window", 10.0))
    try:
        if kind == "constant":
            return HistoryFunction("constant", n, value=tuple(_require(x, "value", where)),
                                   window=window)
        if kind == "signal":
            sigs = [_signal(s, f"{where}.signals[{k}]")
                    for k, s in enumerate(_require(x, "signals", where))]
            return HistoryFunction("signal", n, signals=tuple(sigs), window=window)
        if kind == "table":
            return HistoryFunction("table", n, times=tuple(_require(x, "times", where)),
                                   values=tuple(map(tuple, _require(x, "values", where))),
                                   window=window)
    except ModelFormatError:
        raise
    except (ModelError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{where}: {exc}") from None
    raise ModelFormatError(f"{where}.kind: unknown history kind {kind!r}")


def model_from_dict(doc: dict) -> NetworkModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model: top level must be an object")
    n = _require(doc, "n", "model")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ModelFormatError("model.n: expected positive integer")
    history = _history(doc["history"], n) if doc.get("history") is not None else None
    return NetworkModel(
        n=n,
        d=_vector(doc, "d", n, _signal),
        a=_matrix(doc, "a", n, _signal),
        kernels=_matrix(doc, "kernels", n, _kernel),
        tau=_matrix(doc, "tau", n, _signal),
        inputs=_vector(doc, "inputs", n, _signal),
        g=_activations(doc, "g", n),
        f=_activations(doc, "f", n),
        history=history,
        name=str(doc.get("name", "model")),
    )


def _kernel_to_dict(k: DelayKernel) -> dict:
    return {"atoms": [{"lag": a.lag, "weight": signal_to_dict(a.weight)} for a in k.atoms],
            "densities": [{"coefficient": signal_to_dict(d.coefficient), "p": d.scale,
                           "q": d.degree, "lambda": d.decay} for d in k.densities]}


def _activation_to_dict(s: ActivationSpec) -> dict:
    out = {"kind": s.kind, "lipschitz": s.lipschitz_bound, "monotone": s.requires_monotone,
           "slope": s.slope, "offset": s.offset}
    if s.kind == "table":
        out["table_x"] = list(s.table_x)
        out["table_y"] = list(s.table_y)
    return out


def model_to_dict(model: NetworkModel) -> dict:
    n = model.n
    doc = {
        "name": model.name,
        "n": n,
        "d": [signal_to_dict(s) for s in model.d],
        "a": [[signal_to_dict(s) for s in row] for row in model.a],
        "kernels": [[_kernel_to_dict(k) for k in row] for row in model.kernels],
        "tau": [[signal_to_dict(s) for s in row] for row in model.tau],
        "inputs": [signal_to_dict(s) for s in model.inputs],
        "activations": {"g": [_activation_to_dict(s) for s in model.g],
                        "f": [_activation_to_dict(s) for s in model.f]},
    }
    if model.history is not None:
        doc["history"] = model.history.to_dict()
    return doc


def load_model(path) -> NetworkModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from None
    return model_from_dict(doc)


def save_model(model: NetworkModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")
