"""Smoke test for the stcmc extension module.

Build and run from the repository root:

    cargo build --release -p stcmc-python --features extension-module
    cp target/release/libstcmc.so python/stcmc.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import stcmc  # noqa: E402


def lower_root(lam, mass=1.0):
    lo, hi = 2.0 * mass, 3.0 * mass
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (1.0 - 2.0 * mass / mid) / mid**2 < lam:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main():
    schw = stcmc.Model.schwarzschild(1.0)
    sym = stcmc.Grid.symmetric(2)
    start = schw.s_of_radius(3.0)
    run = stcmc.flow_stcmc(schw, sym, 0.02, [start])
    r = schw.area_radius(run["omega"][0])
    assert run["converged"], run["status"]
    assert abs(r / lower_root(0.02) - 1.0) < 1e-6, r
    print(f"flow: r = {r:.9f} after {run['accepted']} steps")

    grid = stcmc.Grid.axisymmetric(2, 64)
    fol = stcmc.foliate(schw, grid, [0.0] * len(grid), 1.0, 1.0 / 540.0)
    assert fol["termination"] == "instability_detected", fol["termination"]
    assert abs(27.0 * fol["sigma_estimate"] - 1.0) < 0.02
    assert fol["monotone"]
    print(f"foliation: {len(fol['leaves'])} leaves, sigma = {fol['sigma_estimate']:.6f}")

    leaf = fol["leaves"][1]
    rep = stcmc.stability_report(schw, grid, leaf, fol["lambdas"][1])
    assert rep["stable"] and rep["principal_eigenvalue"] > 0.0
    print(f"stability: eigenvalue {rep['principal_eigenvalue']:.3e}")

    d = stcmc.discriminant(3)
    assert abs(d["script_d"] + 1.75) < 1e-12
    assert abs(stcmc.closed_form_discriminant(10, 0.0)) < 1e-12
    hb = stcmc.height_bound(3, 0.0, d["script_d"])
    assert abs(hb - 3.0 * (math.exp(math.pi / math.sqrt(1.75)) - 1.0)) < 1e-6
    cert = stcmc.certificate(3, (0.0, 20.0))
    assert cert["positive"] and cert["slope_sign_ok"] and cert["max_residual"] < 1e-8
    print(f"barriers: D = {d['script_d']}, height bound {hb:.6f}")

    pert = stcmc.Model.minkowski(2).perturbed(ricci0=0.1, shear0=0.05)
    assert pert.theta_bar(1.0, 0.5) < stcmc.Model.minkowski(2).theta_bar(1.0, 0.5)

    try:
        stcmc.discriminant(1)
    except ValueError:
        pass
    else:
        raise AssertionError("n = 1 accepted")

    checks = stcmc.verify([0.2, 0.1, 0.05], 16)
    assert all(c["ok"] for c in checks), [c for c in checks if not c["ok"]]
    print(f"verify: {len(checks)} checks pass")
    print("smoke test passed")


if __name__ == "__main__":
    main()
