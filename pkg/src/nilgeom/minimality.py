"""
Minimal compatible metrics and the data attached to them.

The fixed inner product is minimal for ``(mu, gamma)`` exactly when the
invariant Ricci operator has the form ``Ric^gamma = c I + D`` with ``D`` a
derivation of ``mu``.  Taking the trace form against ``Ric^gamma`` forces
``c = tr((Ric^gamma)^2) / scal``, so the test only has to check that
``D = Ric^gamma - c I`` is a derivation.

The eigenvalues of such a ``D`` are proportional to integers; the ordered
list of those integers with multiplicities is the type of the critical point.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce

import numpy as np

from .algebra import DEFAULT_TOL, delta, derivation_basis, gl_act, jacobi_residual
from .curvature import F_value, detect_center_splitting, invariant_ricci, ricci, scalar_curvature
from .errors import NotLieBracket, NotTwoStep, RationalizationFailed
from .structures import random_structure_group_element

RESIDUAL_EPS = 1e-14
DENOMINATOR_CAP = 64


class Verdict(str, Enum):
    MINIMAL = "minimal"
    NOT_MINIMAL = "not_minimal"
    ABELIAN_TRIVIAL = "abelian_trivial"


@dataclass(frozen=True)
class SolitonCertificate:
    """Outcome of ``soliton_test``: ``Ric^gamma = c I + D`` and how far ``D`` is from Der."""

    c: float
    D: np.ndarray
    residual: float
    verdict: Verdict
    tol: float

    @property
    def is_minimal(self):
        return self.verdict is not Verdict.NOT_MINIMAL

    def to_dict(self):
        return {
            "verdict": self.verdict.value,
            "c": self.c,
            "D": self.D.tolist(),
            "residual": self.residual,
            "tol": self.tol,
        }


def soliton_test(mu, gamma, tol=DEFAULT_TOL, jacobi_tol=None):
    """Certify whether the fixed inner product is minimal for ``(mu, gamma)``.

    The residual ``|delta_mu(D)| / (|mu| max(|D|, eps))`` is scale invariant.
    Raises ``NotLieBracket`` when the Jacobi residual exceeds ``jacobi_tol``
    (default: ``tol``).
    """
    jacobi_tol = tol if jacobi_tol is None else jacobi_tol
    jr = jacobi_residual(mu)
    if jr > jacobi_tol:
        raise NotLieBracket(f"Jacobi residual {jr:.3g} exceeds {jacobi_tol:g}")
    n = mu.dim
    if mu.is_zero():
        return SolitonCertificate(0.0, np.zeros((n, n)), 0.0, Verdict.ABELIAN_TRIVIAL, tol)
    r = invariant_ricci(mu, gamma)
    scal = scalar_curvature(mu)
    c = float(np.sum(r * r) / scal)
    d = r - c * np.eye(n)
    residual = delta(mu, d).norm() / (mu.norm() * max(np.linalg.norm(d), RESIDUAL_EPS))
    verdict = Verdict.MINIMAL if residual <= tol else Verdict.NOT_MINIMAL
    return SolitonCertificate(c, d, float(residual), verdict, tol)


def best_soliton_fit(mu, gamma, tol=DEFAULT_TOL):
    """Least-squares fit of ``Ric^gamma`` by ``c I + D`` with ``D`` in Der(mu).

    Returns ``(c, D, distance)`` where ``distance`` is the fit error relative
    to ``|Ric^gamma|`` (zero for the abelian bracket).
    """
    n = mu.dim
    if mu.is_zero():
        return 0.0, np.zeros((n, n)), 0.0
    r = invariant_ricci(mu, gamma)
    der = derivation_basis(mu, tol).as_array()
    cols = [np.eye(n).ravel()] + [d.ravel() for d in der]
    m = np.array(cols).T
    coef, *_ = np.linalg.lstsq(m, r.ravel(), rcond=None)
    d_fit = (m[:, 1:] @ coef[1:]).reshape(n, n) if len(coef) > 1 else np.zeros((n, n))
    err = r - coef[0] * np.eye(n) - d_fit
    rn = np.linalg.norm(r)
    distance = float(np.linalg.norm(err) / rn) if rn > 0 else 0.0
    return float(coef[0]), d_fit, distance


@dataclass(frozen=True)
class CriticalType:
    """Coprime integers ``k_1 < ... < k_r`` with multiplicities ``d_i``.

    ``scale`` is the positive factor with ``scale * eig(D) = k``.
    """

    ks: tuple
    ds: tuple
    scale: float

    def __str__(self):
        return "<".join(str(k) for k in self.ks) + ";" + ",".join(str(d) for d in self.ds)

    @classmethod
    def parse(cls, text):
        left, right = text.replace(" ", "").strip("()").split(";")
        return cls(tuple(int(k) for k in left.split("<")), tuple(int(d) for d in right.split(",")), 1.0)

    def __eq__(self, other):
        if isinstance(other, str):
            other = CriticalType.parse(other)
        return isinstance(other, CriticalType) and self.ks == other.ks and self.ds == other.ds

    def __hash__(self):
        return hash((self.ks, self.ds))


def _cluster(values, gap):
    clusters = [[values[0]]]
    for v in values[1:]:
        if v - clusters[-1][-1] > gap:
            clusters.append([v])
        else:
            clusters[-1].append(v)
    return clusters


def rationalize_spectrum(eigenvalues, tol=1e-6, gap=1e-6, max_denominator=DENOMINATOR_CAP):
    """Cluster eigenvalues and scale them to coprime integers.

    ``gap`` and ``tol`` are relative to the spectral radius.  Raises
    ``RationalizationFailed`` when some ratio has no rational approximation
    with denominator at most ``max_denominator`` within ``tol``.
    """
    ev = np.sort(np.asarray(eigenvalues, dtype=float))
    radius = float(np.abs(ev).max()) if ev.size else 0.0
    if radius <= RESIDUAL_EPS:
        return CriticalType((0,), (len(ev),), 1.0)
    clusters = _cluster(list(ev), gap * radius)
    means = [float(np.mean(cl)) for cl in clusters]
    mults = tuple(len(cl) for cl in clusters)
    pivot = max(abs(m) for m in means)
    fracs = []
    for m in means:
        ratio = m / pivot
        fr = Fraction(ratio).limit_denominator(max_denominator)
        if abs(float(fr) - ratio) > tol:
            raise RationalizationFailed(
                f"eigenvalue ratio {ratio!r} has no rational fit with denominator <= {max_denominator}"
            )
        fracs.append(fr)
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fracs), 1)
    ints = [int(f * lcm) for f in fracs]
    g = reduce(math.gcd, (abs(k) for k in ints if k), 0) or 1
    ks = tuple(k // g for k in ints)
    if len(set(ks)) != len(ks):
        raise RationalizationFailed(f"distinct eigenvalue clusters collapsed to equal integers {ks}")
    return CriticalType(ks, mults, lcm / (g * pivot))


def critical_type(cert, tol=1e-6, gap=1e-6):
    """Type of a certified critical point, from the eigenvalues of ``cert.D``."""
    if cert.verdict is Verdict.NOT_MINIMAL:
        raise ValueError("critical type requires a minimal certificate")
    d = 0.5 * (cert.D + cert.D.T)
    return rationalize_spectrum(np.linalg.eigvalsh(d), tol=tol, gap=gap)


@dataclass(frozen=True)
class IsometryInvariants:
    scal: float
    ricci_spectrum: tuple
    center_spectrum: tuple
    f_value: float

    def to_dict(self):
        return {
            "scal": self.scal,
            "ricci_spectrum": list(self.ricci_spectrum),
            "center_spectrum": list(self.center_spectrum) if self.center_spectrum is not None else None,
            "F": self.f_value,
        }

    def max_difference(self, other):
        """Largest discrepancy between two sets of invariants (``inf`` if shapes differ)."""
        diffs = [abs(self.scal - other.scal), abs(self.f_value - other.f_value)]
        if len(self.ricci_spectrum) != len(other.ricci_spectrum):
            return math.inf
        diffs += [abs(a - b) for a, b in zip(self.ricci_spectrum, other.ricci_spectrum)]
        if (self.center_spectrum is None) != (other.center_spectrum is None):
            return math.inf
        if self.center_spectrum is not None:
            if len(self.center_spectrum) != len(other.center_spectrum):
                return math.inf
            diffs += [abs(a - b) for a, b in zip(self.center_spectrum, other.center_spectrum)]
        return max(diffs)


def isometry_invariants(mu, gamma, tol=DEFAULT_TOL):
    """Scalar curvature, Ricci spectra (full and on the center) and ``F``."""
    ric = ricci(mu)
    spectrum = tuple(float(x) for x in np.linalg.eigvalsh(ric))
    if mu.is_zero():
        return IsometryInvariants(0.0, spectrum, (), 0.0)
    try:
        s = detect_center_splitting(mu, tol)
        center = tuple(float(x) for x in np.linalg.eigvalsh(s.n2.T @ ric @ s.n2))
    except NotTwoStep:
        center = None
    return IsometryInvariants(scalar_curvature(mu), spectrum, center, F_value(mu, gamma))


def normalize_bracket(mu, gamma, normalization="scal"):
    """Rescale to ``scal = -1`` (``"scal"``) or ``tr((Ric^gamma)^2) = 1`` (``"ricci"``)."""
    if mu.is_zero():
        return mu
    if normalization == "scal":
        return mu * (2.0 / mu.norm())
    if normalization == "ricci":
        r = invariant_ricci(mu, gamma)
        q = float(np.sum(r * r))
        if q == 0.0:
            raise ValueError("invariant Ricci operator vanishes; cannot normalize")
        # Ric^gamma is quadratic in mu, so tr((Ric^gamma)^2) scales like t^4
        return mu * q ** -0.25
    raise ValueError(f"unknown normalization {normalization!r}")


@dataclass(frozen=True)
class Separation:
    verdict: str
    difference: float
    invariants: tuple
    reason: str = ""


def distinguish(mu1, mu2, gamma, tol=1e-6, normalization="scal", soliton_tol=1e-8):
    """Try to separate two structures by isometry invariants of their minimal metrics.

    Returns ``"distinct"`` only when both metrics are certified minimal and
    some normalized invariant differs by more than ``tol``; otherwise
    ``"inconclusive"``.  A positive isomorphism claim is never made.
    """
    for mu in (mu1, mu2):
        try:
            cert = soliton_test(mu, gamma, soliton_tol)
        except NotLieBracket:
            return Separation("inconclusive", 0.0, (), "bracket is not a Lie bracket")
        if not cert.is_minimal:
            return Separation("inconclusive", 0.0, (), "metric is not certified minimal")
    if mu1.dim != mu2.dim:
        return Separation("distinct", math.inf, (), "dimensions differ")
    inv = tuple(isometry_invariants(normalize_bracket(m, gamma, normalization), gamma) for m in (mu1, mu2))
    diff = inv[0].max_difference(inv[1])
    verdict = "distinct" if diff > tol else "inconclusive"
    return Separation(verdict, diff, inv)


def orbit_sample_min_F(mu, gamma, n_samples=50, scale=0.5, seed=0):
    """Smallest ``F(g.mu)`` over random ``g`` in ``G_gamma`` (sampled orbit-minimality check)."""
    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(n_samples):
        g = random_structure_group_element(gamma, scale, rng)
        best = min(best, F_value(gl_act(g, mu), gamma))
    return best
