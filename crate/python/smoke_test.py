"""Smoke test for the schumpeter_py extension module.

Build it with `maturin develop -m crates/python/Cargo.toml`, or copy
`target/release/libschumpeter_py.so` (built with `--features extension-module`)
next to this script as `schumpeter_py.so`.
"""

import json

import schumpeter_py as sp


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    m = sp.GameMatrix(0, 2, 1, 0)
    assert m.kind() == "anti-coordination"
    assert close(m.interior_equilibrium(), 2 / 3, 1e-12)
    assert m.classify().split_at is None

    for protocol in ("ppi", "smith", "bnn"):
        traj = sp.integrate(m, 0.1, protocol=protocol, t_max=100.0)
        assert close(traj.final_state(), 2 / 3, 1e-6), protocol

    coord = sp.GameMatrix(1, 0, 0, 1).classify()
    assert coord.kind == "coordination" and close(coord.split_at, 0.5)

    model = sp.DiversityModel(
        ["y", "yp"],
        {"A1": ["y", "yp"], "A2": ["y"], "A3": ["yp"]},
        {"A1": 0.5, "A2": 0.2, "A3": 0.4},
    )
    assert close(model.diversity(["y"]), 0.7)
    assert close(model.dissimilarity("yp", "y"), 0.4)
    assert model.is_relevant_innovation("yp", "y")

    params = model.schumpeter_params("y", "yp", 10.0, 2.0, 1.0)
    x_i, x_r = params.state()
    assert close(x_i, 2 / 3) and close(x_r, 1 / 3)
    assert close(sp.gamma(params.alpha, params.beta, params.xi), x_i)
    d_alpha, d_beta = sp.gamma_gradient(4.0, 2.0, 0.0)
    assert d_alpha > 0 > d_beta

    a = sp.simulate(m, 0.1, 2000, seed=3, t_max=20.0)
    b = sp.simulate(m, 0.1, 2000, seed=3, t_max=20.0)
    assert a.innovators == b.innovators

    rows = sp.sweep([3.0], [1.2, 5.0], 0.0).splitlines()
    assert rows[2] == "3,5,0,false,,,"

    canonical = sp.parse_scenario('{"game": {"a": 0, "b": 2, "c": 1, "d": 0}}')
    assert json.loads(canonical)["game"]["b"] == 2

    try:
        sp.SchumpeterParams(2, 1, 2, 3)
    except ValueError:
        pass
    else:
        raise AssertionError("alpha <= beta accepted")

    print("schumpeter_py smoke test passed")


if __name__ == "__main__":
    main()
