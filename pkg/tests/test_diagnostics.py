"""Metric-space audits: axioms, negative controls, determinism."""

import dataclasses

import pytest

from bouquet.diagnostics import (AuditResult, audit_B1, audit_B1_natural,
                                 audit_B2_mixing, audit_B3_chaining,
                                 audit_compactness, audit_density, run_all,
                                 snap_to_itinerary)
from bouquet.geometry import ShrinkingConstants, fit_shrinking_constants
from bouquet.potentials import FAIL, PASS


@pytest.fixture(scope="module")
def consts(model):
    return fit_shrinking_constants(model, 1, seed=0)


def test_full_suite_no_failures(model, consts):
    results = run_all(model, 1, consts)
    assert all(r.verdict != FAIL for r in results)
    # B1 on honest constants must be a hard PASS, not merely inconclusive
    assert results[0].axiom == "B1" and results[0].verdict == PASS


def test_b1_natural_metric_exact():
    res = audit_B1_natural()
    assert res.verdict == PASS
    assert res.worst_violation <= 1e-12


def test_b1_broken_constants_fail(model, consts):
    broken = ShrinkingConstants(C_E=1.0, lambda_E=10.0,
                                delta_0=consts.delta_0)
    assert audit_B1(model, 1, broken).verdict == FAIL


def test_b2_mixing_passes(model, consts):
    res = audit_B2_mixing(model, 1, consts.delta_0)
    assert res.verdict == PASS


def test_b3_chaining(model, consts):
    res = audit_B3_chaining(model, 1, consts.delta_0, consts.C_E)
    assert res.verdict in (PASS, "INCONCLUSIVE")


def test_density_audit_passes(model):
    assert audit_density(model).verdict == PASS


def test_compactness_proxy_stabilizes(model):
    res = audit_compactness(model, 1, samples=2000)
    assert res.verdict in (PASS, "INCONCLUSIVE")
    assert res.worst_violation < 1e-3


def test_snap_recovers_symbols(model):
    s = snap_to_itinerary(model, complex(model.p, 0.0))
    assert s is not None
    assert s[0] == 0


def test_audits_deterministic(model, consts):
    a = run_all(model, 1, consts, seed=42)
    b = run_all(model, 1, consts, seed=42)
    assert a == b


def test_audit_result_serialization_round_trips(model, consts):
    res = audit_B1(model, 1, consts)
    assert AuditResult(**dataclasses.asdict(res)) == res
