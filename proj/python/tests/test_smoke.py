import csv
import io
import json

import numpy as np
import pytest

import gsample

CONFIG = json.dumps(
    {
        "preset": "fig1b",
        "graph": {"type": "er", "n": 12, "p": 0.4, "seed": 2},
        "methods": ["bmse", "lr_design"],
        "q_pct": [50],
        "trials": 50,
        "seed": 3,
    }
)


def test_graph_laplacian_rows_sum_to_zero():
    g = gsample.WeightedGraph(3, [(0, 1, 1.0), (1, 2, 2.0)])
    assert g.is_connected()
    assert np.allclose(g.laplacian().sum(axis=1), 0.0)


def test_cost_matches_dense_inverse():
    inst = gsample.ProblemInstance.from_config(CONFIG)
    d = np.linspace(0.1, 0.9, inst.size)
    dd = np.diag(d)
    k = inst.h_m() @ dd @ np.linalg.inv(inst.noise_cov()) @ dd @ inst.h_m() + inst.mu * inst.h_r()
    assert gsample.cost("bmse", inst, d) == pytest.approx(np.trace(np.linalg.inv(k)), rel=1e-10)


def test_gradient_matches_finite_differences():
    inst = gsample.ProblemInstance.from_config(CONFIG)
    d = np.linspace(0.2, 0.8, inst.size)
    g = gsample.gradient("bmse", inst, d)
    h = 1e-6
    e = np.zeros_like(d)
    e[3] = h
    fd = (gsample.cost("bmse", inst, d + e) - gsample.cost("bmse", inst, d - e)) / (2 * h)
    assert g[3] == pytest.approx(fd, rel=1e-5)


def test_greedy_and_pgd_respect_budget():
    inst = gsample.ProblemInstance.from_config(CONFIG)
    sel, trace = gsample.greedy_select(inst, "bmse", 4, "exact-rank-one")
    assert len(sel) == 4 and all(b <= a for a, b in zip(trace, trace[1:]))
    psel, relaxed, _ = gsample.pgd_solve(inst, "bmse", 4)
    assert len(psel) <= 4 and float(relaxed @ relaxed) <= 4 + 1e-9


def test_run_experiment_csv():
    rows = list(csv.DictReader(io.StringIO(gsample.run_experiment(CONFIG))))
    assert [r["method"] for r in rows] == ["bmse", "lr_design"]
    assert all(float(r["mse"]) > 0 for r in rows)
    assert ",".join(rows[0].keys()) == gsample.csv_header()


def test_errors_are_mapped():
    with pytest.raises(ValueError):
        gsample.ProblemInstance.from_config('{"solver": "anneal"}')
    with pytest.raises(RuntimeError):
        gsample.ProblemInstance.from_config('{"graph": {"type": "er", "n": 5, "p": 0.0}}')
