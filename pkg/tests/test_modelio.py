import json

import numpy as np
import pytest

from apstab import HistoryFunction, QuasiPeriodicSignal, derive_bounds, kernel_moment
from apstab.catalog import (constant_network, periodic_network, quasi_periodic_network,
                            scalar_atom)
from apstab.modelio import ModelFormatError, load_model, model_from_dict, model_to_dict, save_model

SCALAR = {
    "name": "scalar",
    "n": 1,
    "d": [2.0],
    "a": [[0.5]],
    "kernels": [[{"atoms": [{"lag": 0.0, "weight": 0.5}]}]],
    "tau": [[0.0]],
    "inputs": [{"offset": 1.0, "terms": [{"amp": 1.0, "freq": 1.0, "phase": 0.0}]}],
    "activations": {"g": {"kind": "tanh", "lipschitz": 1.0},
                    "f": [{"kind": "tanh", "lipschitz": 1.0, "monotone": False}]},
    "history": {"kind": "constant", "value": [0.5]},
}


def test_parse_scalar_document():
    m = model_from_dict(SCALAR)
    assert m.n == 1 and m.name == "scalar"
    assert kernel_moment(m.kernels[0][0], 0.0) == 0.5
    assert derive_bounds(m).i_hat == 2.0
    assert m.history.value == (0.5,)


@pytest.mark.parametrize("factory", [scalar_atom, constant_network, periodic_network,
                                     quasi_periodic_network])
def test_round_trip(factory, tmp_path):
    m = factory()
    path = tmp_path / "m.json"
    save_model(m, path)
    back = load_model(path)
    assert model_to_dict(back) == model_to_dict(m)
    b0, b1 = derive_bounds(m), derive_bounds(back)
    assert np.array_equal(b0.a_sup, b1.a_sup) and b0.i_hat == b1.i_hat


def test_signal_history_round_trip():
    doc = dict(SCALAR, history={"kind": "signal", "window": 3.0,
                                "signals": [{"offset": 0.0,
                                             "terms": [{"amp": 1.0, "freq": 2.0}]}]})
    m = model_from_dict(doc)
    assert isinstance(m.history, HistoryFunction) and m.history.window == 3.0
    assert model_from_dict(model_to_dict(m)).history.signals == (
        QuasiPeriodicSignal(0.0, ((1.0, 2.0, 0.0),)),)


def _broken(**changes):
    doc = json.loads(json.dumps(SCALAR))
    for path, value in changes.items():
        node = doc
        keys = path.split("__")
        for k in keys[:-1]:
            node = node[int(k)] if k.isdigit() else node[k]
        last = keys[-1]
        if value is KeyError:
            del node[last]
        else:
            node[int(last) if last.isdigit() else last] = value
    return doc


@pytest.mark.parametrize("changes, field", [
    (dict(n=KeyError), "'n'"),
    (dict(d=[1.0, 2.0]), "model.d"),
    (dict(a=[[0.5, 1.0]]), "model.a[0]"),
    (dict(inputs__0={"terms": [{"amp": 1.0, "freq": -1.0}]}), "model.inputs[0]"),
    (dict(kernels__0__0={"densities": [{"coefficient": 1.0, "p": 1.0, "q": 0}]}),
     "model.kernels[0][0].densities[0]"),
    (dict(kernels__0__0={"densities": [{"coefficient": 1.0, "lambda": 0.0}]}),
     "model.kernels[0][0]"),
    (dict(activations__g={"kind": "relu", "lipschitz": 1.0}), "model.activations.g"),
    (dict(activations__f=[]), "model.activations.f"),
    (dict(history={"kind": "spline"}), "model.history.kind"),
])
def test_errors_name_the_field(changes, field):
    with pytest.raises(ModelFormatError) as info:
        model_from_dict(_broken(**changes))
    assert field in str(info.value)


def test_truncated_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(SCALAR)[:-20])
    with pytest.raises(ModelFormatError):
        load_model(path)
