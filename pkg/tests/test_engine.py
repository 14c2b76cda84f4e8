"""Transfer operators, pressure, conformal/invariant measures, reports."""

import math
import os

import numpy as np
import pytest

from bouquet.engine import (build, build_operator, conformal_measure,
                            conformality_residual, density, gibbs_check,
                            invariance_residual, invariant_measure,
                            iterate_L_one, normalized_iterate_bounds,
                            pressure_eigen, pressure_iterate,
                            tightness_report)
from bouquet.geometry import endpoint, fit_delta0
from bouquet.potentials import (CLaw, PotentialSpec, UnitLaw, phi_symbolic,
                                variation_report)
from bouquet.shift import (StateCapError, ZERO, cylinders, representative)


def flat_spec():
    return PotentialSpec(t=0.0, c_law=UnitLaw(), strict=False)


class ConstLaw(CLaw):
    """log c = const on every strip: shifts pressure by exactly that."""

    def __init__(self, c):
        self.c = c

    def log_c(self, k):
        return self.c

    def to_json(self):
        return {"kind": "const", "c": self.c}


# --- closed forms ----------------------------------------------------------

def test_flat_potential_pressure_is_log_alphabet_size(model):
    op = build(model, flat_spec(), 1, 2)
    assert pressure_eigen(op).value == pytest.approx(math.log(3.0), abs=1e-12)


def test_flat_potential_measures_uniform(model):
    op = build(model, flat_spec(), 1, 2)
    nu = conformal_measure(op)
    mu = invariant_measure(op, nu).measure
    assert np.abs(nu.weights - 1.0 / 9.0).max() < 1e-12
    assert np.abs(mu.weights - 1.0 / 9.0).max() < 1e-12


def test_constant_potential_shifts_pressure(model):
    c = -0.7
    spec_c = PotentialSpec(t=0.0, c_law=ConstLaw(c), strict=False)
    op = build(model, spec_c, 1, 2)
    assert pressure_eigen(op).value == pytest.approx(math.log(3.0) + c,
                                                     abs=1e-12)


# --- oracle equivalence ----------------------------------------------------

def _brute_force(model, spec, N, m):
    """Independent dense construction: explicit loops, numpy eig."""
    words = list(cylinders(N, m))
    idx = {w: i for i, w in enumerate(words)}
    n = len(words)
    M = np.zeros((n, n))
    for w in words:  # target cylinder
        for u in range(-N, N + 1):
            src = (u,) + w[:-1]
            s = representative((u,) + w)
            M[idx[w], idx[src]] += math.exp(phi_symbolic(model, spec, s))
    vals, vecs = np.linalg.eig(M)
    i = np.argmax(vals.real)
    theta = vals.real[i]
    h = np.abs(vecs.real[:, i])
    valsL, vecsL = np.linalg.eig(M.T)
    j = np.argmax(valsL.real)
    nu = np.abs(vecsL.real[:, j])
    nu /= nu.sum()
    mu = h * nu
    mu /= mu.sum()
    return math.log(theta), nu, mu


@pytest.mark.parametrize("m", [1, 2, 3])
def test_brute_force_oracle_equivalence(model, spec, m):
    op = build(model, spec, 1, m)
    P_o, nu_o, mu_o = _brute_force(model, spec, 1, m)
    assert pressure_eigen(op).value == pytest.approx(P_o, abs=1e-10)
    nu = conformal_measure(op)
    assert np.abs(nu.weights - nu_o).max() < 1e-10
    mu = invariant_measure(op, nu).measure
    assert np.abs(mu.weights - mu_o).max() < 1e-10


def test_dense_eigensolver_cross_check(model, spec, op14):
    dense = op14.matrix.toarray()
    theta = np.linalg.eigvals(dense).real.max()
    assert pressure_eigen(op14).value == pytest.approx(math.log(theta),
                                                       abs=1e-10)


# --- pressure structure ----------------------------------------------------

def test_pressure_monotone_in_N(model, spec):
    vals = [pressure_eigen(build(model, spec, N, 4)).value for N in (1, 2, 3)]
    assert vals[0] <= vals[1] + 1e-12
    assert vals[1] <= vals[2] + 1e-12


def test_pressure_depth_convergence(model, spec):
    vals = [pressure_eigen(build(model, spec, 1, m)).value
            for m in (2, 3, 4, 5)]
    gaps = [abs(b - a) for a, b in zip(vals, vals[1:])]
    assert gaps[-1] < gaps[0]
    assert gaps[-1] < 1e-3


def test_cross_route_agreement(model, spec, op16):
    # the iterate route carries a log h(s)/n bias; at n=10 it is under 1e-2
    P = pressure_eigen(op16).value
    series = pressure_iterate(model, spec, 1, ZERO, 10)
    assert abs(series[7].value - P) < 1.5e-2
    assert series[-1].value == pytest.approx(P, abs=1e-2)


def test_iterate_route_is_exhaustive_sum(model, spec):
    # n = 1 by hand: sum over the three one-symbol pullbacks
    total = sum(math.exp(phi_symbolic(model, spec,
                                      representative((u,))))
                for u in (-1, 0, 1))
    assert iterate_L_one(model, spec, 1, ZERO, 1)[0] == pytest.approx(
        total, abs=1e-12)


def test_state_cap_respected(model, spec, monkeypatch):
    monkeypatch.setenv("BOUQUET_STATE_CAP", "10")
    with pytest.raises(StateCapError):
        build_operator(model, spec, 1, 3)


# --- measures --------------------------------------------------------------

def test_conformality_residual_small(model, spec, op14):
    nu = conformal_measure(op14)
    theta = pressure_eigen(op14).theta
    assert conformality_residual(op14, nu, theta) < 1e-10


def test_invariance_residual_small(op14):
    nu = conformal_measure(op14)
    mu = invariant_measure(op14, nu).measure
    assert invariance_residual(mu) < 1e-10


def test_cesaro_surrogate_converges(op14):
    nu = conformal_measure(op14)
    res = invariant_measure(op14, nu, M_max=32)
    assert res.converged
    assert res.cesaro_tv <= 1e-6
    # the plain-average trajectory decreases overall
    assert res.cesaro_tv_by_M[-1] < res.cesaro_tv_by_M[0]


def test_density_positive(op14):
    h = density(op14)
    assert (h > 0).all()


def test_measure_determinism(model, spec):
    a = conformal_measure(build(model, spec, 1, 3)).weights
    b = conformal_measure(build(model, spec, 1, 3)).weights
    assert np.array_equal(a, b)


# --- reports ---------------------------------------------------------------

def test_gibbs_ratios_within_fitted_envelope(model, spec, op16):
    P = pressure_eigen(op16).value
    nu = conformal_measure(op16)
    rep = gibbs_check(op16, nu, P, seed=0, n_list=(1, 2, 3, 4))
    delta = fit_delta0(model, 1, np.random.default_rng(7))
    vr = variation_report(model, spec, delta, n_max=8, seed=3)
    C_prime = math.exp(vr.W_r / (1.0 - vr.fitted_r))
    assert rep.envelope_violation(C_prime) <= 0.0


def test_gibbs_constant_stable_in_depth(op16):
    P = pressure_eigen(op16).value
    nu = conformal_measure(op16)
    rep = gibbs_check(op16, nu, P, seed=0, n_list=(2, 4))
    d2, d4 = rep.D_hat_by_n[2], rep.D_hat_by_n[4]
    assert abs(d4 - d2) / d2 < 0.2


def test_tightness_measured_below_bound(model, spec):
    rows = tightness_report(model, spec, (1, 2), (5.0, 10.0, 20.0), m=3)
    for row in rows:
        assert row["measured"] <= row["bound"]
    for N in (1, 2):
        bounds = [r["bound"] for r in rows if r["N"] == N]
        assert all(b <= a for a, b in zip(bounds, bounds[1:]))


def test_normalized_iterates_bounded(op14):
    rep = normalized_iterate_bounds(op14, R=10.0)
    assert rep["passed"]
    assert rep["min"][-1] > 0.0
