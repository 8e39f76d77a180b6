"""Smoke tests for the Python bindings.

Run against the build tree by pointing POWSIM_EXT_DIR at the directory that
holds the compiled _powsim module (ctest does this automatically), or against
an installed wheel with no extra setup.
"""

import math
import os
import sys

for var in ("POWSIM_EXT_DIR", "POWSIM_PKG_DIR"):
    path = os.environ.get(var)
    if path and path not in sys.path:
        sys.path.insert(0, path)

import powsim  # noqa: E402


def test_distribution_kernel():
    assert powsim.cdf("normal", {"mu": 0, "sigma": 1}, 0.0) == 0.5
    q = powsim.quantile("normal", {"mu": 0, "sigma": 1}, 0.975)
    assert abs(q - 1.959964) < 1e-5
    assert abs(powsim.cdf("binomial", {"n": 10, "p": 0.5}, 2) - 0.0546875) < 1e-12


def test_sampling_is_deterministic():
    a = powsim.sample("normal", {"mu": 0, "sigma": 1}, 100, seed=42, stream=3)
    b = powsim.sample("normal", {"mu": 0, "sigma": 1}, 100, seed=42, stream=3)
    c = powsim.sample("normal", {"mu": 0, "sigma": 1}, 100, seed=42, stream=4)
    assert a == b
    assert a != c
    assert abs(sum(a) / len(a)) < 0.5


def test_tests_return_dicts():
    r = powsim.t_test_one_sample([1, 2, 3, 4, 5, 6], 0.0)
    assert r["valid"]
    assert abs(r["p_value"] - 0.00593354451759226) < 1e-9
    b = powsim.binom_exact_test(8, 10, 0.5)
    assert abs(b["p_value"] - 0.109375) < 1e-12


def test_catalog_and_power():
    ids = {s["id"] for s in powsim.list_scenarios()}
    assert "binom-exact" in ids
    assert "anova-rm-two-factor" in ids
    assert len(ids) == 40
    e = powsim.estimate_power("t-one-sample", n=30, reps=400, seed=11, workers=2)
    assert 0.6 < e["power"] < 0.95
    assert math.isclose(
        e["mc_se"], math.sqrt(e["power"] * (1 - e["power"]) / 400), rel_tol=1e-12
    )
    e2 = powsim.estimate_power("t-one-sample", n=30, reps=400, seed=11, workers=8)
    assert e["power"] == e2["power"]


def test_null_variant_calibrates():
    e = powsim.estimate_power(
        "z-one-sample", n=30, reps=2000, seed=5, null_variant=True
    )
    assert 0.02 < e["power"] < 0.08


def test_curve_and_ci_width():
    pts = powsim.power_curve("t-one-sample", [10, 30], reps=300, seed=3)
    assert [p["n"] for p in pts] == [10, 30]
    assert pts[0]["power"] < pts[1]["power"]
    w = powsim.ci_width("mean-known-var", n=55, reps=20, seed=1, params={"sigma": 7.5})
    assert abs(w["mean_width"] - 3.9642223) < 1e-5


def test_oracle():
    assert abs(powsim.oracle.power_t_one_sample(30, 4, 7.5, 0.05) - 0.806) < 0.002
    assert abs(powsim.oracle.power_z_one_sample(30, 0, 7.5, 0.05) - 0.05) < 1e-9
