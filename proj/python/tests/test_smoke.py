import math

import numpy as np
import pytest

import polyheat


def test_heat_kernel_matches_gaussian():
    prof = polyheat.kernel_profile("polyharmonic", N=1, m=1, r_max=20.0)
    r = prof.radii
    exact = np.exp(-r * r / 4.0) / math.sqrt(4.0 * math.pi)
    assert np.max(np.abs(prof.values - exact)) < 1e-8 * exact[0]
    assert prof.mass() == pytest.approx(1.0, abs=1e-4)
    # G(r, t) = t^{-N/2m} G(r t^{-1/2m}, 1)
    assert prof(1.0, 4.0) == pytest.approx(math.exp(-1.0 / 16.0) / math.sqrt(16.0 * math.pi), rel=1e-6)


def test_biharmonic_kernel_changes_sign():
    prof = polyheat.kernel_profile("polyharmonic", N=1, m=2, r_max=20.0)
    assert prof.value0() > 0.0
    assert prof.min_value() < -1e-10


def test_cauchy_semigroup_residual_is_small(tmp_path):
    prof = polyheat.kernel_profile("stable", N=1, theta=1.0, r_max=400.0, cache_dir=str(tmp_path))
    assert prof.at_radius(1.0) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-6)
    assert polyheat.semigroup_residual(prof, 2.0, 1.0, 200.0, 1 << 12) < 1e-5


def test_cutoff_values():
    assert polyheat.eta(0.5) == 1.0
    assert polyheat.eta(3.0) == 0.0
    assert polyheat.eta(1.5) == pytest.approx(0.5, abs=1e-15)
    s = np.linspace(0.0, 3.0, 1001)
    assert np.all(np.diff(polyheat.eta(s)) <= 0.0)
    # eta(s) + eta(3 - s) = 1 makes odd derivatives symmetric about 1.5.
    assert polyheat.eta_derivative(1, 1.2) == pytest.approx(polyheat.eta_derivative(1, 1.8), rel=1e-6)


@pytest.mark.parametrize("N,m", [(1, 2), (2, 2), (3, 3)])
def test_dirac_dichotomy(N, m):
    pm = 1.0 + 2.0 * m / N
    below = polyheat.classify({"N": N, "m": m, "p": 1.0 + 0.5 * (pm - 1.0), "data": "kind=dirac mass=1"})
    above = polyheat.classify({"N": N, "m": m, "p": 2.0 * pm, "data": "kind=dirac mass=1"})
    assert below["summary"].startswith("EXISTS_BY")
    assert above["summary"].startswith("NONEXISTENCE_BY")


def test_constant_data_follows_the_ode(tmp_path):
    # u = c (1 - (p-1) c^{p-1} t)^{-1/(p-1)} for spatially constant data.
    c, p, T = 0.5, 2.0, 0.5
    rep = polyheat.solve({
        "N": 1, "m": 2, "p": p, "data": f"kind=power c={c} a=0 cutoff=1000",
        "T": T, "L": 8.0, "n": 64, "nt": 128, "tol": 1e-12, "force": True, "richardson": True,
        "cache_dir": str(tmp_path),
    })
    assert rep["converged"]
    for snap in rep["snapshots"]:
        v = c / (1.0 - (p - 1.0) * c ** (p - 1.0) * snap["t"])
        assert np.max(np.abs(snap["u"] - v)) < 1e-4


def test_errors_carry_a_category():
    with pytest.raises(polyheat.PolyheatError) as info:
        polyheat.classify({"N": 4})
    assert info.value.code == "UnsupportedDimension"
    with pytest.raises(polyheat.PolyheatError) as info:
        polyheat.normalized_config({"no_such_key": 1})
    assert info.value.code == "InvalidConfig"


def test_config_hash_ignores_output_location():
    base = {"N": 2, "p": 2.5, "data": "kind=dirac mass=0.3"}
    assert polyheat.config_hash(base) == polyheat.config_hash({**base, "output_dir": "/tmp/x", "cache_dir": "/tmp/y"})
    assert polyheat.config_hash(base) != polyheat.config_hash({**base, "p": 2.6})
    assert "weight_mode" in polyheat.config_keys()
