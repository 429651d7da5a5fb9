import math
import os

import pytest

import omegalab

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "..", "configs")


def test_parse_x_exact():
    assert omegalab.parse_x("1e7") == 10_000_000
    assert omegalab.parse_x("2.5e6") == 2_500_000
    with pytest.raises(omegalab.ValidationError):
        omegalab.parse_x("1.5")


def test_census_small():
    assert omegalab.census(10) == {(0,): 1, (1,): 7, (2,): 2}
    counts = omegalab.census("1e4", os.path.join(CONFIGS, "ap_q4.json"))
    assert sum(counts.values()) == 10_000
    assert all(len(k) == 3 for k in counts)


def test_census_errors():
    with pytest.raises(omegalab.ValidationError):
        omegalab.census(10, os.path.join(CONFIGS, "missing.json"))
    with pytest.raises(omegalab.CapacityError):
        omegalab.census("1e12")


def test_lab_estimates():
    lab = omegalab.Lab({"kind": "ap", "q": 4, "cells": [[1], [3]]}, cutoff="1e6")
    assert lab.cells == 3
    assert len(lab.partition["c"]) == 3
    sp = lab.saddle("1e6", [0, 2, 2])
    assert sp["sigma"] > 1
    assert abs(sp["residual_logx"]) < 1e-8
    t1 = lab.theorem1("1e6", [0, 2, 2])
    t2 = lab.theorem2("1e6", [0, 2, 2])
    n = lab.census("1e6")[(0, 2, 2)]
    for r in (t1, t2):
        est = math.exp(r["log_estimate"])
        assert 0.1 < n / est < 10
    with pytest.raises(omegalab.NumericError):
        lab.saddle("1e6", [2, 0, 0])


def test_compare_csv():
    lab = omegalab.Lab(None, cutoff="1e6")
    csv = lab.compare_csv("1e5", omegalab.parse_k_grid("2..3"))
    lines = csv.strip().splitlines()
    assert lines[0].startswith("x,k,census,theorem1")
    assert len(lines) == 3


def test_box_integral():
    lab = omegalab.Lab(None, cutoff="1e6")
    b = lab.box_integral("1e6", [4])
    assert b["converged"]
    assert b["ratio"] > 0
