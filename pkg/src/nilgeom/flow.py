"""
Gradient flows for the functional ``F = tr((Ric^gamma)^2) / |mu|^4``.

``flow_run`` follows the negative gradient of ``F`` on the unit sphere of
brackets, ``d mu/dt = pi_T delta_mu(Ric^gamma_mu)`` where ``pi_T`` removes the
radial component.  The velocity always has the form ``-A.mu`` with ``A`` in
``g_gamma``, so the true trajectory stays inside the ``G_gamma``-orbit of the
start.  Integrating it naively in bracket coordinates is unstable: the
orbit is attracting inside itself but not in the ambient space, and round-off
grows exponentially near critical points.  Instead the flow is integrated in
the group: ``mu_t = h_t.mu_0 / |h_t.mu_0|`` with ``h_t`` advanced by a
fourth-order Runge-Kutta-Munthe-Kaas step.  Each velocity is replaced by its
minimum-norm representative modulo derivations and scalings (which do not
move the normalized bracket), keeping ``h_t`` well conditioned.

``normalized_metric_flow`` evolves the metric instead of the bracket, and
``orbit_infimum_probe`` samples one-parameter subgroups to show that the
unnormalized ``tr((Ric^gamma)^2)`` is not bounded below on an orbit.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .algebra import BracketTensor, delta, delta_matrix, expm, gl_act, v_inner
from .curvature import F_value, invariant_ricci, ricci, scalar_curvature
from .errors import FlowDivergence, NotLieBracket
from .minimality import soliton_test
from .structures import (
    StructureKind,
    integrability_residual,
    invariant_part,
    project_structure_algebra,
    structure_algebra_basis,
)

DEFAULT_GRAD_TOL = 1e-9
CERTIFICATE_TOL = 1e-6
F_INCREASE_GUARD = 1e-6
MAX_HALVINGS = 20
REBASE_CONDITION = 1e6


def grad_F(mu, gamma):
    """Tangential part of ``delta_mu(Ric^gamma_mu)`` at the normalized bracket.

    With the Euclidean metric on brackets this is the negative gradient of
    ``F`` on the unit sphere: moving along it decreases ``F`` at rate
    ``|grad_F|^2``.  It vanishes exactly at critical points.
    """
    if mu.is_zero():
        raise ValueError("gradient is undefined at the zero bracket")
    mu = mu.normalized()
    v = delta(mu, invariant_ricci(mu, gamma))
    return v - v_inner(v, mu) * mu


def _commutator(a, b):
    return a @ b - b @ a


@dataclass
class _GroupField:
    """Minimum-norm generator in ``g_gamma`` of the normalized bracket velocity."""

    gamma: object
    basis: np.ndarray = field(init=False)

    def __post_init__(self):
        b = structure_algebra_basis(self.gamma)
        self.basis = b.reshape(b.shape[0], -1).T  # columns are flattened basis matrices

    def __call__(self, mu):
        """Smallest ``X`` in ``g_gamma`` with ``delta_mu(X) = delta_mu(Ric^gamma)`` up to multiples of ``mu``."""
        n = mu.dim
        r = invariant_ricci(mu, self.gamma)
        m = delta_matrix(mu) @ self.basis
        u = mu.coeffs[np.triu_indices(n, k=1)].reshape(-1)
        u = u / np.linalg.norm(u)
        m_perp = m - np.outer(u, u @ m)
        coeffs = self.basis.T @ r.ravel()
        target = m_perp @ coeffs
        x, *_ = np.linalg.lstsq(m_perp, target, rcond=1e-10)
        return (self.basis @ x).reshape(n, n)


@dataclass
class FlowTrace:
    """Time series recorded by ``flow_run``."""

    times: list
    brackets: list
    f_values: list
    scal_values: list
    grad_norms: list
    constraint_residuals: list
    converged: bool
    steps: int
    final_step: float
    final_certificate: object = None

    @property
    def endpoint(self):
        return self.brackets[-1]

    def max_f_increase(self):
        f = np.asarray(self.f_values)
        return float(np.max(np.diff(f))) if f.size > 1 else 0.0

    def to_csv(self, target=None):
        """Write columns ``t, F, scal, grad_norm``; returns the text if no target is given."""
        buf = io.StringIO() if target is None else None
        handle = buf if target is None else (open(target, "w", newline="") if isinstance(target, str) else target)
        try:
            w = csv.writer(handle)
            w.writerow(["t", "F", "scal", "grad_norm"])
            for row in zip(self.times, self.f_values, self.scal_values, self.grad_norms):
                w.writerow([repr(float(x)) for x in row])
        finally:
            if isinstance(target, str):
                handle.close()
        return buf.getvalue() if buf is not None else None


def _rkmk4(field_fn, h, base, dt):
    """One Runge-Kutta-Munthe-Kaas step for ``h' = A(h) h`` with ``A = -field``."""

    def gen(hh):
        return -field_fn(_normalize(gl_act(hh, base)))

    k1 = gen(h)
    k2 = gen(expm(0.5 * dt * k1) @ h)
    k3 = gen(expm(0.5 * dt * k2 - dt * dt / 8.0 * _commutator(k1, k2)) @ h)
    k4 = gen(expm(dt * k3) @ h)
    u = dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4 - 0.5 * dt * _commutator(k1, k4))
    return expm(u) @ h


def _normalize(mu):
    return BracketTensor(mu.coeffs / mu.norm())


def flow_run(mu0, gamma, step=2.0, max_steps=5000, grad_tol=DEFAULT_GRAD_TOL,
             record_every=1, certificate_tol=CERTIFICATE_TOL):
    """Follow the negative gradient flow of ``F`` from ``mu0``.

    Stops when ``|grad_F| <= grad_tol`` or after ``max_steps`` steps.  If ``F``
    increases by more than 1e-6 in a step the step is retried with half the
    size (at most 20 times) before ``FlowDivergence`` is raised.  The endpoint
    is certified with ``soliton_test`` when it is a Lie bracket.
    """
    if mu0.is_zero():
        raise ValueError("cannot flow the zero bracket")
    field_fn = _GroupField(gamma)
    base = _normalize(mu0)
    h = np.eye(mu0.dim)
    mu = base
    dt = float(step)
    t = 0.0
    trace = FlowTrace([], [], [], [], [], [], False, 0, dt)

    def record(mu, t, f, g):
        trace.times.append(t)
        trace.brackets.append(mu)
        trace.f_values.append(f)
        trace.scal_values.append(scalar_curvature(mu))
        trace.grad_norms.append(g)
        trace.constraint_residuals.append(integrability_residual(mu, gamma))

    f = F_value(mu, gamma)
    g = grad_F(mu, gamma).norm()
    k = 0
    while True:
        if g <= grad_tol:
            trace.converged = True
            break
        if k >= max_steps:
            break
        if k % record_every == 0:
            record(mu, t, f, g)
        halvings = 0
        while True:
            h_new = _rkmk4(field_fn, h, base, dt)
            mu_new = _normalize(gl_act(h_new, base))
            f_new = F_value(mu_new, gamma)
            if f_new - f <= F_INCREASE_GUARD:
                break
            halvings += 1
            if halvings > MAX_HALVINGS:
                raise FlowDivergence(f"F increased by {f_new - f:.3g} at t={t:.6g} even with step {dt:.3g}")
            dt *= 0.5
        h, mu, f = h_new, mu_new, f_new
        t += dt
        k += 1
        g = grad_F(mu, gamma).norm()
        if np.linalg.cond(h) > REBASE_CONDITION:
            base, h = mu, np.eye(mu.dim)
    record(mu, t, f, g)
    trace.steps = k
    trace.final_step = dt
    try:
        trace.final_certificate = soliton_test(mu, gamma, certificate_tol)
    except NotLieBracket:
        trace.final_certificate = None
    return trace


@dataclass
class MetricTrace:
    times: list
    metrics: list
    scal_values: list
    invariant_ricci: list


def metric_curvature(mu, p):
    """Ricci operator and scalar curvature of the metric ``<P., .>``.

    ``P = L^T L`` identifies ``(mu, <P., .>)`` isometrically with
    ``(L.mu, <., .>)`` via ``L``; the operator is pulled back by ``L``.
    """
    l = np.linalg.cholesky(p).T  # upper triangular, P = L^T L
    nu = gl_act(l, mu)
    li = np.linalg.inv(l)
    ric_p = li @ ricci(nu) @ l
    return ric_p, scalar_curvature(nu)


def _metric_rhs(mu, gamma, p, sign):
    ric_p, scal = metric_curvature(mu, p)
    rg = invariant_part(ric_p, gamma)
    if scal == 0.0:
        return np.zeros_like(p), rg, scal
    c = float(np.trace(rg @ rg)) / scal
    # bilinear form of Ric^gamma at P is P Ric^gamma_P
    form = p @ rg
    form = 0.5 * (form + form.T)
    return sign * (form - c * p), rg, scal


def normalized_metric_flow(mu, gamma, sign=-1, step=1e-3, max_steps=1000, p0=None):
    """Evolve ``dP/dt = sign (ric^gamma(P) - (tr(Ric^gamma(P))^2 / scal(P)) P)`` with RK4.

    ``sign = -1`` is the direction matching the bracket flow (decreasing ``F``).
    Scalar curvature is conserved along the exact flow.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    n = mu.dim
    p = np.eye(n) if p0 is None else np.array(p0, dtype=float)
    trace = MetricTrace([], [], [], [])
    t = 0.0
    for k in range(max_steps + 1):
        try:
            rhs1, rg, scal = _metric_rhs(mu, gamma, p, sign)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise FlowDivergence(f"metric degenerated at t={t:.6g} (step {k})") from exc
        trace.times.append(t)
        trace.metrics.append(p.copy())
        trace.scal_values.append(scal)
        trace.invariant_ricci.append(rg)
        if k == max_steps:
            break
        try:
            k2 = _metric_rhs(mu, gamma, p + 0.5 * step * rhs1, sign)[0]
            k3 = _metric_rhs(mu, gamma, p + 0.5 * step * k2, sign)[0]
            k4 = _metric_rhs(mu, gamma, p + step * k3, sign)[0]
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise FlowDivergence(f"metric lost positive definiteness near t={t:.6g} (step {k + 1})") from exc
        p = p + step / 6.0 * (rhs1 + 2 * k2 + 2 * k3 + k4)
        p = 0.5 * (p + p.T)
        t += step
        if np.linalg.eigvalsh(p)[0] <= 0:
            raise FlowDivergence(f"metric lost positive definiteness at t={t:.6g} (step {k + 1})")
    return trace


def orbit_infimum_probe(mu, gamma, trials=20, t_max=10.0, n_t=41, seed=0):
    """Running minimum of the unnormalized ``tr((Ric^gamma)^2)`` along random ``exp(tA).mu``.

    ``A`` ranges over random symmetric elements of ``g_gamma``; entry ``i`` of
    the result is the smallest value seen in the first ``i + 1`` trials.
    """
    if gamma.kind is StructureKind.SYMPLECTIC and integrability_residual(mu, gamma) > 1e-8:
        raise ValueError("the bracket is not closed for the symplectic structure")
    if mu.is_zero():
        return np.zeros(trials)
    rng = np.random.default_rng(seed)
    n = mu.dim
    best = np.inf
    out = []
    ts = np.linspace(-t_max, t_max, n_t)
    for _ in range(trials):
        a = project_structure_algebra(rng.standard_normal((n, n)), gamma)
        a = 0.5 * (a + a.T)
        a /= np.linalg.norm(a)
        for t in ts:
            try:
                r = invariant_ricci(gl_act(expm(t * a), mu, max_condition=1e14), gamma)
            except ValueError:
                continue
            best = min(best, float(np.sum(r * r)))
        out.append(best)
    return np.array(out)


def tr_invariant_ricci_squared(mu, gamma):
    r = invariant_ricci(mu, gamma)
    return float(np.sum(r * r))
