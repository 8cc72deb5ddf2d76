"""Smoke test for the Python bindings.

    pip install --no-build-isolation -e crates/py
    python python/smoke_test.py
"""

import math

import mmdose_py as mm

GHZ = 1e9


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    eps = mm.skin_permittivity("Gabriel", 60 * GHZ)
    close(eps.eps_real, 8.0, 1e-12)
    close(eps.eps_imag, 10.9, 1e-12)
    close(mm.eps_imag_to_sigma(mm.sigma_to_eps_imag(30.0, 60 * GHZ), 60 * GHZ), 30.0, 1e-9)

    r = mm.reflectance(eps)
    close(r, 0.378, 0.005)
    close(mm.reflectance(eps, 0.0, "perpendicular"), r, 1e-15)
    brewster = math.degrees(mm.brewster_angle(eps))
    assert 70 < brewster < 76, brewster
    close(mm.penetration_depth(eps, 60 * GHZ) * 1e3, 0.48, 0.02)
    assert len(mm.skin_models()) == 6

    lossless = mm.Permittivity(4.0, 0.0)
    close(math.degrees(mm.brewster_angle(lossless)), math.degrees(math.atan(2.0)), 1e-4)
    try:
        mm.penetration_depth(lossless, 60 * GHZ)
    except ValueError:
        pass
    else:
        raise AssertionError("lossless medium must have no penetration depth")

    ten = mm.solve_preset("naked-skin", 60 * GHZ, 10.0)
    fifty = mm.solve_preset("1", 60 * GHZ, 50.0)
    close(fifty.surface_theta / ten.surface_theta, 5.0, 1e-9)
    close(fifty.surface_theta, 0.8, 0.2)
    z = [i * 1e-4 for i in range(10)]  # within the 1 mm skin
    sar = ten.sar_rho(z)
    assert all(b < a for a, b in zip(sar, sar[1:]))
    assert ten.theta([0.035, 0.05]) == [0.0, 0.0]
    close(sum(ten.absorbed_per_layer), 10.0 * (1 - ten.reflectance), 1e-9)

    report = mm.evaluate_compliance(0.1, 10.0, 0.01, 0.10, 60 * GHZ)
    assert report.verdict == "Compliant", report
    close(report.power_density, 7.9577, 1e-3)
    assert mm.evaluate_compliance(0.1, 10.0, 0.01, 0.05, 60 * GHZ).verdict == "NonCompliant"
    near = mm.evaluate_compliance(0.1, 10.0, 0.01, 0.03, 60 * GHZ)
    assert near.verdict == "NearFieldIndeterminate" and near.power_density is None
    occ = mm.evaluate_compliance(
        0.1, 10.0, 0.01, 0.05, 60 * GHZ, standard="ICNIRP", population="occupational"
    )
    assert occ.limit == 50.0 and occ.verdict == "Compliant"

    print("python smoke test passed")


if __name__ == "__main__":
    main()
