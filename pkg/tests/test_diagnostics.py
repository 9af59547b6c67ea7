import math
from dataclasses import replace

import pytest

from gyrofp.config import RunConfig
from gyrofp.diagnostics import (
    INEQUALITIES,
    RECORD_FIELDS,
    DiagnosticsRecord,
    check_apriori,
    compute_record,
)
from gyrofp.runner import run
from gyrofp.solver import PhysicalParams


def rec(t, **kw):
    base = dict(
        t=t, mass=1.0, norm_2u=1.0, norm_2m=2.0, norm_l2m_l4=1.5, grad_norm_2m=0.1,
        rho_h_half=0.01, phi_h1=0.01, min_f=0.0, boundary_mass_fraction=0.0,
    )
    base.update(kw)
    return DiagnosticsRecord(**base)


def test_fields_order():
    assert RECORD_FIELDS[0] == "t" and RECORD_FIELDS[-1] == "boundary_mass_fraction"
    assert len(rec(0.0).as_tuple()) == 10


def test_synthetic_one_percent_violation():
    params = PhysicalParams(beta=0.1)
    t = 1.0
    bound = math.exp(0.1 * t)
    report = check_apriori([rec(0.0), rec(t, norm_2u=1.01 * bound)], params, enabled=("u_norm",))
    worst = report.worst
    assert not report.passed
    assert worst.name == "u_norm" and worst.t == t
    assert math.isclose(worst.margin, -0.01, rel_tol=1e-12)
    assert "FAIL u_norm" in report.summary()


def test_within_slack_passes():
    params = PhysicalParams(beta=0.0)
    report = check_apriori([rec(0.0), rec(2.0, norm_2u=1.0 + 5e-7)], params)
    assert report.passed
    strict = check_apriori([rec(0.0), rec(2.0, norm_2u=1.0 + 5e-7)], params, slack=1e-8)
    assert [c.name for c in strict.failures()] == ["u_norm"]


def test_energy_bound_beta_zero_limit():
    nu = 0.02
    params = PhysicalParams(nu=nu, beta=0.0)
    t = 3.0
    bound = 4.0 + 2 * nu * 2 * t * 1.0
    ok = check_apriori([rec(0.0), rec(t, norm_2m=math.sqrt(bound) * (1 - 1e-9))], params, enabled=("m_norm",))
    bad = check_apriori([rec(0.0), rec(t, norm_2m=math.sqrt(bound) * 1.001)], params, enabled=("m_norm",))
    assert ok.passed and not bad.passed


def test_zero_solution_passes():
    zero = dict(norm_2u=0.0, norm_2m=0.0, norm_l2m_l4=0.0, rho_h_half=0.0, mass=0.0)
    report = check_apriori([rec(0.0, **zero), rec(1.0, **zero)], PhysicalParams())
    assert report.passed
    assert all(c.margin == 0.0 for c in report.checks)


def test_input_errors():
    with pytest.raises(ValueError):
        check_apriori([], PhysicalParams())
    with pytest.raises(ValueError):
        check_apriori([rec(0.5)], PhysicalParams())
    with pytest.raises(ValueError):
        check_apriori([rec(0.0)], PhysicalParams(), enabled=("energy",))


def test_nonfinite_fails():
    report = check_apriori([rec(0.0), rec(1.0, norm_2u=math.nan)], PhysicalParams(), enabled=("u_norm",))
    assert not report.passed


def small_config(**kw):
    cfg = RunConfig(params=PhysicalParams(K=6, N_u=16), t_end=0.5, record_interval=0.25)
    return replace(cfg, **kw)


def test_run_t_end_zero_single_record():
    result = run(small_config(t_end=0.0))
    assert len(result.series) == 1 and result.series[0].t == 0.0
    assert result.ok and result.state.step_count == 0


def test_run_records_and_monitors():
    result = run(small_config())
    state, series = result
    assert [r.t for r in series] == [0.0, 0.25, 0.5]
    assert state.time == 0.5
    assert result.status == "completed" and result.report.passed
    assert math.isclose(series[0].mass, 1.0, rel_tol=1e-13)
    assert abs(series[-1].mass - 1.0) < 1e-12
    assert set(c.name for c in result.report.checks) == set(INEQUALITIES)
    assert compute_record(state) == series[-1]
