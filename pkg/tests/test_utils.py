import json
import math
from enum import Enum

import numpy as np
import pytest

from capfin.utils.formatting import csv_cell, format_float, to_csv, to_json
from capfin.utils.workers import THREADS_ENV, ordered_map, worker_count


class _Color(Enum):
    red = "red"


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(math.nan) == '"nan"'
    assert format_float(-math.inf) == '"-inf"'


def test_to_json_keeps_order_and_normalizes():
    doc = {"b": np.float64(1.5), "a": (1, 2), "c": np.array([0.25]), "d": _Color.red, "e": None, "f": True}
    text = to_json(doc)
    assert list(json.loads(text)) == ["b", "a", "c", "d", "e", "f"]
    assert json.loads(text) == {"b": 1.5, "a": [1, 2], "c": [0.25], "d": "red", "e": None, "f": True}
    assert to_json({}) == "{}" and to_json([]) == "[]"
    with pytest.raises(TypeError):
        to_json(object())


def test_to_json_round_trips_floats():
    x = 0.1 + 0.2
    assert json.loads(to_json([x]))[0] == x


def test_csv():
    assert csv_cell(0.1) == "0.1"
    assert csv_cell(None) == ""
    assert csv_cell(np.int64(3)) == "3"
    assert to_csv(("a", "b"), [(1, 0.5), (2, None)]) == "a,b\n1,0.5\n2,\n"


def test_worker_count(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert worker_count() == 3
    monkeypatch.setenv(THREADS_ENV, "zero")
    assert worker_count(default=2) == 2
    monkeypatch.delenv(THREADS_ENV)
    assert worker_count(default=0) == 1
    assert worker_count() >= 1


@pytest.mark.parametrize("workers", [1, 4])
def test_ordered_map_keeps_order(workers):
    assert ordered_map(lambda x: x * x, range(20), workers=workers) == [x * x for x in range(20)]
    assert ordered_map(lambda x: x, [], workers=workers) == []
