"""Smoke test for the svst_minimax extension module.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import math

import svst_minimax as sm


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    p = sm.minimax_amse(0.0, class_="mat", beta=1.0)
    close(p.amse, 0.0, 1e-12)
    close(p.lambda_star, 2.0, 1e-12)
    close(sm.minimax_amse(1.0, beta=0.5).amse, 1.0, 1e-12)

    sym = sm.minimax_amse(0.5, class_="sym")
    close(sym.lambda_star, sm.minimax_threshold_square(0.5, 0.5), 1e-9)
    close(sm.mp_incomplete_moment(1.0, 0.5, 0.5), 0.546972288054033661526, 1e-8)
    close(sm.qc_moment(1, 0.0), 8 / (3 * math.pi), 1e-12)
    close(sm.small_rho_slope(class_="mat", beta=0.25), 3.5, 1e-12)

    curve = sm.tabulate([0.0, 0.25, 0.5, 0.75, 1.0], beta=0.5)
    amse = [pt.amse for pt in curve]
    assert amse == sorted(amse), amse

    y = [[3.0, 0.0, 0.0], [0.0, 0.5, 0.0]]
    out = sm.svst_denoise(y, 1.0)
    close(out[0][0], 2.0, 1e-12)
    close(out[1][1], 0.0, 1e-12)
    close(sm.sure([[1.0, 0.2, 0.1], [0.3, 0.7, 0.4]], 0.0), 2.0, 1e-9)

    risk = sm.monte_carlo_risk(5, 50, mu=20.0, trials=20, seed=1)
    assert 0.0 < risk.mean < 1.0, risk
    check = sm.sure_vs_empirical(3, 30, 0.6, trials=200, seed=2)
    assert abs(check.discrepancy_z) <= 4.0, check
    fin = sm.finite_n_minimax(5, 50, trials=100, seed=3)
    assert 0.0 < fin.lambda_star < 2.5, fin

    try:
        sm.minimax_amse(1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("rho outside [0, 1] should raise ValueError")

    print(f"svst_minimax {sm.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
