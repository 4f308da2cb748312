import io
import warnings

import numpy as np
import pytest

from nilgeom import (
    BracketTensor,
    F_value,
    FlowDivergence,
    flow_run,
    gl_act,
    grad_F,
    invariant_ricci,
    normalized_metric_flow,
    orbit_infimum_probe,
    ricci,
    scalar_curvature,
    standard_structure,
)
from nilgeom import catalog as C
from nilgeom.algebra import v_inner
from nilgeom.flow import metric_curvature, tr_invariant_ricci_squared
from nilgeom.structures import random_structure_group_element

SYMP6 = standard_structure("symplectic", 6)


def perturbed(mu, gamma, seed, scale=0.3):
    return gl_act(random_structure_group_element(gamma, scale, seed), mu)


def test_grad_zero_at_critical_points():
    assert grad_F(C.abc_curve(0.3), SYMP6).norm() < 1e-10
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", C.DomainWarning)
        for n in (4, 6, 8):
            assert grad_F(C.heisenberg(n), standard_structure("symplectic", n)).norm() < 1e-10


def test_grad_is_tangent():
    mu = perturbed(C.abc_curve(0.3), SYMP6, 1)
    v = grad_F(mu, SYMP6)
    assert abs(v_inner(v, mu.normalized())) < 1e-14


def test_grad_matches_finite_differences():
    # moving along the returned direction decreases F at rate |v|^2
    for mu, gamma in [
        (perturbed(C.abc_curve(0.3), SYMP6, 2, 0.6), SYMP6),
        (perturbed(C.complex_iwasawa_curve(0.5, 0.5), standard_structure("complex", 6), 3, 0.6),
         standard_structure("complex", 6)),
    ]:
        mu = mu.normalized()
        v = grad_F(mu, gamma)
        h = 1e-5
        fd = (F_value(mu + v * h, gamma) - F_value(mu - v * h, gamma)) / (2 * h)
        assert fd < 0
        assert fd == pytest.approx(-v.norm() ** 2, rel=1e-5)


def test_grad_zero_bracket_rejected():
    with pytest.raises(ValueError):
        grad_F(BracketTensor.zero(4), standard_structure("symplectic", 4))


def test_flow_exits_immediately_at_minimum():
    mu = C.m26_curve(0.5)
    tr = flow_run(mu, SYMP6)
    assert tr.converged and tr.steps == 0
    assert np.abs(tr.endpoint.coeffs - mu.normalized().coeffs).max() < 1e-15
    assert tr.final_certificate.is_minimal


def test_flow_converges_filiform():
    gamma = standard_structure("symplectic", 4)
    tr = flow_run(perturbed(C.filiform4(), gamma, 0, 0.5), gamma)
    assert tr.converged
    assert tr.max_f_increase() <= 1e-9
    assert tr.f_values[-1] == pytest.approx(F_value(C.filiform4(), gamma), abs=1e-9)
    assert all(abs(b.norm() - 1) < 1e-12 for b in tr.brackets)
    assert all(s == pytest.approx(-0.25) for s in tr.scal_values)
    assert tr.final_certificate.residual < 1e-6


def test_flow_complex_keeps_integrability():
    gamma = standard_structure("complex", 6)
    mu = perturbed(C.complex_nonabelian_curve(1.5, True), gamma, 4, 0.5)
    tr = flow_run(mu, gamma)
    assert tr.converged
    assert max(tr.constraint_residuals) < 1e-12


def test_flow_respects_max_steps():
    tr = flow_run(perturbed(C.abc_curve(0.3), SYMP6, 5), SYMP6, max_steps=3)
    assert not tr.converged
    assert tr.steps == 3
    assert len(tr.times) == 4


def test_trace_csv():
    tr = flow_run(perturbed(C.filiform4(), standard_structure("symplectic", 4), 0), standard_structure("symplectic", 4),
                  max_steps=5)
    text = tr.to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == "t,F,scal,grad_norm"
    assert len(lines) == len(tr.times) + 1
    buf = io.StringIO()
    tr.to_csv(buf)
    assert buf.getvalue() == text


def test_flow_zero_bracket_rejected():
    with pytest.raises(ValueError):
        flow_run(BracketTensor.zero(4), standard_structure("symplectic", 4))


def test_metric_curvature_identity_metric():
    mu = C.abc_curve(0.3)
    ric, scal = metric_curvature(mu, np.eye(6))
    assert np.abs(ric - ricci(mu)).max() < 1e-15
    assert scal == pytest.approx(scalar_curvature(mu))


def test_metric_curvature_pullback():
    # the metric <h^T h ., .> on mu is isometric to the standard one on h.mu
    mu = C.m26_curve(0.6)
    h = random_structure_group_element(SYMP6, 0.4, 6)
    ric_p, scal_p = metric_curvature(mu, h.T @ h)
    assert scal_p == pytest.approx(scalar_curvature(gl_act(h, mu)))
    assert np.abs(h @ ric_p @ np.linalg.inv(h) - ricci(gl_act(h, mu))).max() < 1e-12


def test_metric_flow_conserves_scal():
    h = random_structure_group_element(SYMP6, 0.5, 7)
    tr = normalized_metric_flow(C.abc_curve(0.3), SYMP6, step=1e-3, max_steps=1000, p0=h.T @ h)
    assert np.ptp(tr.scal_values) < 1e-6
    assert min(np.linalg.eigvalsh(p)[0] for p in tr.metrics) > 0


def test_metric_flow_static_at_minimum():
    tr = normalized_metric_flow(C.m26_curve(0.6), SYMP6, step=1e-3, max_steps=200)
    r0 = tr.invariant_ricci[0]
    assert max(np.abs(r - r0).max() for r in tr.invariant_ricci) < 1e-6


def test_metric_flow_zero_bracket_constant():
    tr = normalized_metric_flow(BracketTensor.zero(4), standard_structure("symplectic", 4), max_steps=10)
    assert all(np.array_equal(p, np.eye(4)) for p in tr.metrics)


def test_metric_flow_sign_validation():
    with pytest.raises(ValueError):
        normalized_metric_flow(C.abc_curve(0.3), SYMP6, sign=0)


def test_metric_flow_divergence_reported():
    # far too large a step drives the metric out of the positive definite cone
    with pytest.raises(FlowDivergence):
        normalized_metric_flow(C.abc_curve(0.3), SYMP6, sign=1, step=10.0, max_steps=100,
                               p0=np.diag([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]))


def test_orbit_infimum_probe_decreases():
    vals = orbit_infimum_probe(C.heisenberg(4), standard_structure("symplectic", 4), trials=15)
    assert np.all(np.diff(vals) <= 0)
    assert vals[-1] < 0.05 * tr_invariant_ricci_squared(C.heisenberg(4), standard_structure("symplectic", 4))
    assert np.all(orbit_infimum_probe(BracketTensor.zero(4), standard_structure("symplectic", 4)) == 0)


def test_scaling_path_quartic():
    mu = C.abc_curve(0.3)
    base = tr_invariant_ricci_squared(mu, SYMP6)
    for t in (0.5, 1.0, 2.0):
        r = invariant_ricci(mu * np.exp(-t), SYMP6)
        assert np.sum(r * r) == pytest.approx(np.exp(-4 * t) * base, rel=1e-12)
