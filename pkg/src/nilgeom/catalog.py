"""
Named example brackets paired with the structure they are studied with.

Parameter-domain conditions (closedness, integrability, normalization) are
checked with warnings rather than errors so that off-variety tensors can still
be built and inspected.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import BracketTensor, jacobi_residual
from .structures import (
    StructureKind,
    integrability_residual,
    quaternion_blocks,
    standard_structure,
)

DOMAIN_TOL = 1e-12


class DomainWarning(UserWarning):
    """Parameters lie outside the documented domain of a catalog family."""


def _warn(msg):
    warnings.warn(msg, DomainWarning, stacklevel=3)


def heisenberg(n):
    """``mu(X1, X2) = X3`` in dimension ``n`` (the 3-dim Heisenberg algebra plus R^(n-3)).

    The standard symplectic form pairs ``X3`` with ``X_(n-2)``, so it is closed
    only for ``n = 4``; for ``n >= 6`` a ``DomainWarning`` is issued.  The
    invariant Ricci operator and the minimality test do not depend on
    closedness.
    """
    if n < 4 or n % 2:
        raise ValueError(f"dimension must be even and at least 4, got {n}")
    if n > 4:
        _warn(f"the standard symplectic form is not closed for the Heisenberg bracket in dimension {n}")
    return BracketTensor.from_brackets(n, [(1, 2, 3, 1.0)])


def filiform4():
    """``mu(X1, X2) = X3``, ``mu(X1, X3) = X4``."""
    return BracketTensor.from_brackets(4, [(1, 2, 3, 1.0), (1, 3, 4, 1.0)])


def abc_family(a, b, c):
    """``mu(X1,X2) = a X4``, ``mu(X1,X3) = b X5``, ``mu(X2,X3) = c X6``.

    The standard symplectic form is closed iff ``a - b + c = 0``.
    """
    if abs(a - b + c) > DOMAIN_TOL * max(1.0, abs(a), abs(b), abs(c)):
        _warn(f"a - b + c = {a - b + c:.3g} != 0: the symplectic form is not closed")
    return BracketTensor.from_brackets(6, [(1, 2, 4, a), (1, 3, 5, b), (2, 3, 6, c)])


def abc_curve(t):
    """``abc_family(s, s + t, t)`` with ``s^2 + st + t^2 = 1`` (so ``scal = -1``), ``0 <= t <= 1/sqrt(3)``."""
    if not 0.0 <= t <= 1.0 / math.sqrt(3.0) + DOMAIN_TOL:
        _warn(f"t = {t} outside [0, 1/sqrt(3)]")
    s = 0.5 * (-t + math.sqrt(max(4.0 - 3.0 * t * t, 0.0)))
    return abc_family(s, s + t, t)


def m26_tensor(a, b, c, d, e, f):
    """The graded 6-dim tensor with brackets 12->3, 13->4, 14->5, 15->6, 23->5, 24->6.

    It satisfies Jacobi iff ``b f = d e`` and the standard symplectic form is
    closed iff ``f = a + c``.
    """
    return BracketTensor.from_brackets(
        6, [(1, 2, 3, a), (1, 3, 4, b), (1, 4, 5, c), (1, 5, 6, d), (2, 3, 5, e), (2, 4, 6, f)]
    )


def m26_family(x, y):
    """``m26_tensor(x, 1, x + y, 1, 1, y)`` exactly as parameterized by the printed ellipse.

    The printed ellipse ``x^2 + xy + y^2 = 1`` only meets the Lie, closed
    locus at ``(x, y) = (0, 1)``: Jacobi needs ``y = 1`` and closedness needs
    ``x = 0``.  Elsewhere a ``DomainWarning`` is issued; use ``m26_curve`` for
    the corrected one-parameter family of minimal metrics.
    """
    if abs(x * x + x * y + y * y - 1.0) > 1e-9:
        _warn(f"(x, y) = ({x}, {y}) is off the ellipse x^2 + xy + y^2 = 1")
    mu = m26_tensor(x, 1.0, x + y, 1.0, 1.0, y)
    if jacobi_residual(mu) > DOMAIN_TOL or abs(x) > DOMAIN_TOL:
        _warn(f"(x, y) = ({x}, {y}) gives a tensor that is not a closed Lie bracket; see m26_curve")
    return mu


M26_U_MAX = math.sqrt(37.0) - 5.0


def m26_curve_params(u, branch=-1):
    """Coefficients ``(a, b, c, d, e, f)`` of the corrected critical curve.

    Along it ``|mu|^2 = 10`` and ``Ric^ac = -diag(5, 3, 1, -1, -3, -5)/4``;
    ``u = d^2 = e^2`` ranges over ``(0, sqrt(37) - 5]`` and ``branch`` selects
    the sign of the square root.  ``u = 1, branch = -1`` gives ``(0, 1, 1, 1, 1, 1)``.
    """
    if not 0.0 < u <= M26_U_MAX + 1e-12:
        raise ValueError(f"u must lie in (0, {M26_U_MAX:.6f}], got {u}")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    b = math.sqrt(2.0 - u)
    d = e = math.sqrt(u)
    f = u / b
    disc = max(6.0 - 2.0 * u - 3.0 * f * f, 0.0)
    a = 0.5 * (f + branch * math.sqrt(disc))
    c = f - a
    return a, b, c, d, e, f


def m26_curve(u, branch=-1):
    """Closed Lie brackets of the m26 shape with minimal compatible metric, parameterized by ``u``."""
    return m26_tensor(*m26_curve_params(u, branch))


def _vec(v, size):
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape != (size,):
        raise ValueError(f"expected a {size}-vector, got shape {v.shape}")
    return v


_PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))


def _two_step(vectors, size):
    """Bracket on ``R^4 + R^size`` with ``mu(X_i, X_j) = sum_k v[k] Z_k`` for the six pairs."""
    table = []
    for (i, j), v in zip(_PAIRS, vectors):
        for k, coef in enumerate(_vec(v, size)):
            if coef != 0.0:
                table.append((i, j, 5 + k, float(coef)))
    return BracketTensor.from_brackets(4 + size, table)


def j2(v):
    """Complex structure on R^2: ``J(v1, v2) = (-v2, v1)``."""
    v = _vec(v, 2)
    return np.array([-v[1], v[0]])


def complex_w6(A, B, C, D, E, F):
    """2-step bracket ``n1 = R^4 -> n2 = R^2`` given by the six pair vectors.

    ``A..F`` are the coefficients of ``mu(X1,X2), mu(X1,X3), mu(X1,X4),
    mu(X2,X3), mu(X2,X4), mu(X3,X4)`` in ``Z1, Z2`` (coordinates 5, 6).
    """
    return _two_step((A, B, C, D, E, F), 2)


def w6_is_integrable(A, B, C, D, E, F, tol=DOMAIN_TOL):
    return bool(np.abs(_vec(E, 2) - (_vec(B, 2) + j2(D) + j2(C))).max() <= tol)


def w6_is_abelian(A, B, C, D, E, F, tol=DOMAIN_TOL):
    return bool(np.abs(_vec(E, 2) - _vec(B, 2)).max() <= tol and np.abs(_vec(D, 2) + _vec(C, 2)).max() <= tol)


def w6_is_biinvariant(A, B, C, D, E, F, tol=DOMAIN_TOL):
    jb = j2(B)
    return bool(
        np.abs(_vec(A, 2)).max() <= tol
        and np.abs(_vec(F, 2)).max() <= tol
        and np.abs(_vec(C, 2) - jb).max() <= tol
        and np.abs(_vec(D, 2) - jb).max() <= tol
        and np.abs(_vec(E, 2) + _vec(B, 2)).max() <= tol
    )


def complex_integrable(A, B, C, D, F):
    """``complex_w6`` with ``E = B + JD + JC`` so that ``J`` is integrable."""
    E = _vec(B, 2) + j2(D) + j2(C)
    return complex_w6(A, B, C, D, E, F)


def _check_norm(total, target, what):
    if abs(total - target) > 1e-9:
        _warn(f"{what} = {total:.6g}, expected {target:g} for scal = -1")


def complex_abelian_curve(s, t):
    """Abelian: ``A = (s, t)``, ``F = (-s, t)``, rest zero; ``s^2 + t^2 = 1``."""
    _check_norm(s * s + t * t, 1.0, "s^2 + t^2")
    z = (0.0, 0.0)
    return complex_w6((s, t), z, z, z, z, (-s, t))


def complex_iwasawa_curve(s, t):
    """Abelian on the complex Heisenberg algebra: ``A = (s, t)``, ``F = (-s, t)``, ``B = C = -D = E = (1/2, 0)``; ``s^2 + t^2 = 1/2``."""
    _check_norm(s * s + t * t, 0.5, "s^2 + t^2")
    h = (0.5, 0.0)
    return complex_w6((s, t), h, h, (-0.5, 0.0), h, (-s, t))


def complex_htype_curve(s, t):
    """Abelian, modified H-type: ``A = (s, 0) = -F``, ``B = (0, t) = E``, ``C = D = 0``; ``s^2 + t^2 = 1``."""
    _check_norm(s * s + t * t, 1.0, "s^2 + t^2")
    z = (0.0, 0.0)
    return complex_w6((s, 0.0), (0.0, t), z, z, (0.0, t), (-s, 0.0))


def complex_nonabelian_curve(t, normalize=False):
    """Non-abelian: ``C = D = (s, 0)``, ``B = -tJC``, ``E = (2 - t)JC``, ``A = F = 0``.

    ``s = sqrt(2 + t^2 + (2 - t)^2)`` as printed; this makes
    ``|mu|^2 = 2 s^4`` rather than 4, so ``normalize=True`` rescales to
    ``scal = -1``.
    """
    s = math.sqrt(2.0 + t * t + (2.0 - t) ** 2)
    jc = np.array([0.0, s])
    z = (0.0, 0.0)
    mu = complex_w6(z, -t * jc, (s, 0.0), (s, 0.0), (2.0 - t) * jc, z)
    if normalize:
        mu = mu * (2.0 / mu.norm())
    return mu


def hypercomplex_w8_raw(A, B, C, D, E, F):
    """2-step bracket ``n1 = R^4 -> n2 = R^4`` given by the six pair vectors (coordinates 5..8)."""
    return _two_step((A, B, C, D, E, F), 4)


def hypercomplex_w8(A, B, C, T):
    """Integrable element of the 8-dim family: ``D = -C + T``, ``E = B + J1 T``, ``F = -A + J2 T``."""
    q1, q2, _ = quaternion_blocks()
    A, B, C, T = (_vec(v, 4) for v in (A, B, C, T))
    return hypercomplex_w8_raw(A, B, C, -C + T, B + q1 @ T, -A + q2 @ T)


def w8_vectors(mu):
    """Recover ``(A, B, C, D, E, F)`` from an 8-dim 2-step bracket in the standard splitting."""
    c = mu.coeffs
    return tuple(c[i - 1, j - 1, 4:8].copy() for i, j in _PAIRS)


def w8_integrability_defect(A, B, C, D, E, F):
    """Largest violation of ``D = -C + T``, ``E = B + J1 T``, ``F = -A + J2 T`` with ``T = C + D``."""
    q1, q2, _ = quaternion_blocks()
    A, B, C, D, E, F = (_vec(v, 4) for v in (A, B, C, D, E, F))
    t = C + D
    return float(max(np.abs(E - B - q1 @ t).max(), np.abs(F + A - q2 @ t).max()))


def hypercomplex_abelian_rst(r, s, t):
    """``T = 0``, ``A = (0, r, 0, 0)``, ``B = (0, 0, s, 0)``, ``C = (0, 0, 0, t)``.

    ``scal = -1`` corresponds to ``r^2 + s^2 + t^2 = 1`` (each vector appears
    twice among the six pairs).
    """
    _check_norm(r * r + s * s + t * t, 1.0, "r^2 + s^2 + t^2")
    return hypercomplex_w8((0, r, 0, 0), (0, 0, s, 0), (0, 0, 0, t), (0, 0, 0, 0))


def hypercomplex_nonabelian_rst(r, s, t):
    """``T = (0, 0, 0, 1)`` with ``A = (0, r, 0, 0)``, ``B = (0, 0, s, 0)``, ``C = (0, 0, 0, t)``.

    ``scal = -1`` corresponds to ``r^2 + s^2 + t^2 - r - s - t = -1/2``.
    """
    _check_norm(r * r + s * s + t * t - r - s - t, -0.5, "r^2 + s^2 + t^2 - r - s - t")
    return hypercomplex_w8((0, r, 0, 0), (0, 0, s, 0), (0, 0, 0, t), (0, 0, 0, 1))


def hypercomplex_curve(t, exponent=2):
    """Non-abelian curve, ``0 <= t <= 1/sqrt(3)``, with ``T = (0, 0, 0, 2t)``.

    ``mu(X1,X2) = sqrt(1 - 3t^2) Z1 + t Z2 = -mu(X3,X4) + 2t Z2`` and the
    remaining brackets have coefficient ``t``.  ``exponent=3`` reproduces the
    variant ``sqrt(1 - 3t^3)``, which is inconsistent with ``scal = -1``.
    """
    root = math.sqrt(max(1.0 - 3.0 * t**exponent, 0.0))
    return hypercomplex_w8((root, t, 0, 0), (0, 0, t, 0), (0, 0, 0, t), (0, 0, 0, 2 * t))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    dim: int
    params: tuple
    structure_kind: StructureKind
    locus: str
    builder: object

    def build(self, **params):
        unknown = set(params) - {p for p, _ in self.params}
        if unknown:
            raise ValueError(f"unknown parameters for {self.name}: {sorted(unknown)}")
        values = dict(self.params)
        values.update({k: float(v) for k, v in params.items()})
        mu = self.builder(**values)
        return mu, standard_structure(self.structure_kind, mu.dim)


def _vec_builder(fn, names, size):
    def build(**kw):
        return fn(*(tuple(kw[f"{n}{i + 1}"] for i in range(size)) for n in names))

    return build


def _vec_params(names, size, defaults):
    return tuple((f"{n}{i + 1}", float(defaults.get(n, (0.0,) * size)[i])) for n in names for i in range(size))


CATALOG = {
    e.name: e
    for e in (
        CatalogEntry("heisenberg", 4, (("n", 4.0),), StructureKind.SYMPLECTIC,
                     "h3 + R^(n-3)", lambda n: heisenberg(int(n))),
        CatalogEntry("filiform4", 4, (), StructureKind.SYMPLECTIC,
                     "4-dim filiform", filiform4),
        CatalogEntry("abc", 6, (("a", 1.0), ("b", 1.0), ("c", 0.0)), StructureKind.SYMPLECTIC,
                     "2-step, 3-dim center", abc_family),
        CatalogEntry("abc_curve", 6, (("t", 0.0),), StructureKind.SYMPLECTIC,
                     "abc(s, s+t, t), s^2+st+t^2=1", abc_curve),
        CatalogEntry("m26", 6, (("x", 0.0), ("y", 1.0)), StructureKind.SYMPLECTIC,
                     "m26(x, 1, x+y, 1, 1, y)", m26_family),
        CatalogEntry("m26_curve", 6, (("u", 1.0), ("branch", -1.0)), StructureKind.SYMPLECTIC,
                     "corrected 6-step-graded critical curve",
                     lambda u, branch: m26_curve(u, int(branch))),
        CatalogEntry("m26_tensor", 6, tuple((k, 0.0) for k in "abcdef"), StructureKind.SYMPLECTIC,
                     "graded 6-dim tensor", m26_tensor),
        CatalogEntry("complex_w6", 6, _vec_params("ABCDEF", 2, {}), StructureKind.COMPLEX,
                     "2-step, R^4 -> R^2", _vec_builder(complex_w6, "ABCDEF", 2)),
        CatalogEntry("complex_abelian_curve", 6, (("s", 0.0), ("t", 1.0)), StructureKind.COMPLEX,
                     "h3 + h3 (s > 0)", complex_abelian_curve),
        CatalogEntry("complex_iwasawa_curve", 6, (("s", math.sqrt(0.5)), ("t", 0.0)), StructureKind.COMPLEX,
                     "complex Heisenberg (t != 0)", complex_iwasawa_curve),
        CatalogEntry("complex_htype_curve", 6, (("s", 1.0), ("t", 0.0)), StructureKind.COMPLEX,
                     "modified H-type", complex_htype_curve),
        CatalogEntry("complex_nonabelian_curve", 6, (("t", 1.0), ("normalize", 0.0)), StructureKind.COMPLEX,
                     "complex Heisenberg for 1 <= t < 2",
                     lambda t, normalize: complex_nonabelian_curve(t, bool(normalize))),
        CatalogEntry("hypercomplex_w8", 8, _vec_params("ABCT", 4, {}), StructureKind.HYPERCOMPLEX,
                     "integrable 2-step, R^4 -> R^4", _vec_builder(hypercomplex_w8, "ABCT", 4)),
        CatalogEntry("hypercomplex_abelian_rst", 8, (("r", 0.0), ("s", 0.0), ("t", 1.0)),
                     StructureKind.HYPERCOMPLEX, "abelian hypercomplex", hypercomplex_abelian_rst),
        CatalogEntry("hypercomplex_nonabelian_rst", 8, tuple((k, 0.5 + 0.5 / math.sqrt(3.0)) for k in "rst"),
                     StructureKind.HYPERCOMPLEX, "non-abelian hypercomplex", hypercomplex_nonabelian_rst),
        CatalogEntry("hypercomplex_curve", 8, (("t", 0.5),), StructureKind.HYPERCOMPLEX,
                     "non-abelian hypercomplex curve", hypercomplex_curve),
    )
}


def build(name, **params):
    """Look up a catalog entry and build ``(bracket, structure)``."""
    try:
        entry = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(sorted(CATALOG))}") from None
    return entry.build(**params)


def check_entry(mu, gamma):
    """Jacobi and integrability residuals of a built entry."""
    return {"jacobi": jacobi_residual(mu), "integrability": integrability_residual(mu, gamma)}
