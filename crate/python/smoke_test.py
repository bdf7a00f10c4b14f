"""Smoke test for the pylpmra extension.

Build and install first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pylpmra-*.whl

then run ``python python/smoke_test.py``.
"""

import itertools
import math

import pylpmra as lp

J = 8
N = 1 << J


def close(a, b, tol):
    return abs(a - b) <= tol * (1.0 + abs(b))


def check_projector():
    haar = lp.ScalingSystem("haar", J, 0, 1)
    proj = lp.Projector(haar, 0, 1)
    assert proj.kappa_max == J - 4
    half = lp.Function.indicator(J, 0, 1, 0.0, 0.5)
    e0 = proj.project(half, 0).real()
    assert all(close(v, 0.5, 1e-15) for v in e0)
    d1 = proj.detail(half, 1).real()
    assert all(close(v, 0.5 if i < N // 2 else -0.5, 1e-15) for i, v in enumerate(d1))
    # nested: E_1 E_3 f == E_1 f
    f = lp.Function(J, 0, 1, [math.sin(7.0 * (i + 0.5) / N) for i in range(N)])
    a = proj.project(proj.project(f, 3), 1)
    assert a.sup_distance(proj.project(f, 1)) <= 1e-13


def check_scaling():
    db2 = lp.ScalingSystem("db2", J)
    report = db2.validate()
    assert db2.orthonormal and report["biorthogonality_defect"] < 1e-6
    lo, hi = db2.support
    assert db2.phi().bounds == (0.0, 3.0)
    assert 0.0 <= lo < 1.0 and 2.5 < hi <= 3.0


def check_tensor():
    haar = lp.ScalingSystem("haar", 6, 0, 1)
    tensor = lp.Tensor([haar, haar], 0, 1)
    x = lp.Function.indicator(6, 0, 1, 0.0, 0.25)
    y = lp.Function.indicator(6, 0, 1, 0.0, 0.5)
    f = lp.Function.tensor_product([x, y])
    g = tensor.project(f, [1, 0]).real()
    n = 64
    for c0, c1 in itertools.product(range(n), range(n)):
        want = 0.25 if c0 < n // 2 else 0.0
        assert close(g[c0 * n + c1], want, 1e-15)
    factored = tensor.detail(f, [1, 2])
    expanded = tensor.detail(f, [1, 2], path="inclusion-exclusion")
    assert factored.sup_distance(expanded) <= 1e-13
    # Parseval for an orthonormal system: ||Sf||_2 = ||f||_2 when f is scale-limited
    rec = tensor.lp_ratio(f, 2.0, [2, 2])
    assert close(rec["ratio"], 1.0, 1e-12), rec
    sweep = tensor.sign_sweep(f, 2.0, [2, 2], trials=8, seed=3)
    assert all(close(r["ratio"], 1.0, 1e-10) for r in sweep["records"])


def check_khintchine():
    a = [1.0, -2.0, 0.5, 3.0]
    s2 = sum(x * x for x in a)
    s4 = sum(x**4 for x in a)
    rep = lp.khintchine(a, 4.0)
    assert close(rep["moment"], (3.0 * s2 * s2 - 2.0 * s4) ** 0.25, 1e-13)
    assert rep["lower_ratio"] <= 1.0 + 1e-12 and rep["upper_ratio"] >= 1.0 - 1e-12
    assert lp.khintchine_constants(2.0) == (1.0, 1.0)
    a_p, b_p = lp.khintchine_constants(1.5)
    assert close(a_p, 2 ** (0.5 - 1 / 1.5), 1e-12) and b_p == 1.0


def check_cz():
    unit = lp.Function.indicator(J, -2, 2, 0.0, 1.0)
    dec = lp.cz(unit, 0.25)
    assert dec["selected"] == [(-1, 0)], dec["selected"]
    assert dec["all_passed"]
    good = dec["good"].real()
    assert all(v == 0.0 or close(v, 0.5, 1e-15) for v in good)
    for h in dec["bad_parts"]:
        assert abs(sum(h.real())) <= 1e-12 * len(h)


def check_weak11():
    haar = lp.ScalingSystem("haar", J, 0, 1)
    tensor = lp.Tensor([haar], 0, 1)
    box = lp.Function.indicator(J, 0, 1, 0.0, 1.0)
    point = tensor.weak11_sup(box, [1] * (J - 3), J - 4)
    assert close(point["product"], 1.0, 1e-9), point


def check_errors():
    haar = lp.ScalingSystem("haar", J, 0, 1)
    proj = lp.Projector(haar, 0, 1)
    f = lp.Function.indicator(J, 0, 1, 0.0, 0.5)
    try:
        proj.project(f, J)
    except ValueError as e:
        assert "scale" in str(e)
    else:
        raise AssertionError("scale above the limit must be rejected")


if __name__ == "__main__":
    for check in (check_projector, check_scaling, check_tensor, check_khintchine, check_cz, check_weak11, check_errors):
        check()
        print(f"ok  {check.__name__}")
    print("all smoke checks passed")
