"""Quick check that the extension imports and agrees with known limits.

Build it first:  pip install --no-build-isolation ./crates/python
"""

import math

import hnf_cavity


def main():
    mesh = hnf_cavity.build_mesh("lshape", 8)
    assert mesh["valid"]
    assert math.isclose(mesh["area"], 1 - 0.75**2, rel_tol=1e-12)
    assert len(mesh["coordinates"]) == mesh["nodes"]

    clear = hnf_cavity.compute_ratios(0.0)
    assert all(math.isclose(v, 1.0, rel_tol=1e-12) for v in clear.values())
    hybrid = hnf_cavity.compute_ratios(0.01)
    assert hybrid["conductivity_ratio"] > 1.0 and hybrid["mu_ratio"] > 1.0

    # pure conduction across the unit square
    cond = hnf_cavity.run_case("square", 8, pr=0.71, ra=0.0)
    assert cond["converged"]
    assert abs(cond["nu"] - 1.0) < 1e-9

    # de Vahl Davis: Nu = 1.118 at Ra = 1e3
    case = hnf_cavity.run_case("square", 24, pr=0.71, ra=1e3)
    assert abs(case["nu"] - 1.118) < 5e-3, case
    print(case["summary"])

    mms = hnf_cavity.mms_study("polynomial", levels=3)
    assert max(mms["err_u_h1"]) < 1e-6

    try:
        hnf_cavity.run_case("octagon")
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("unknown shape accepted")

    print("smoke test passed, hnf_cavity", hnf_cavity.__version__)


if __name__ == "__main__":
    main()
