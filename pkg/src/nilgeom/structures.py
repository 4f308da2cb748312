"""
Linear geometric structures on R^n and the algebraic conditions they impose.

Every structure is encoded by orthogonal maps ``J`` with ``J^2 = -I`` against
the fixed background inner product, which builds metric compatibility into the
type:

* symplectic: a single ``J`` with ``omega(X, Y) = <X, J Y>``;
* complex: a single ``J``;
* hypercomplex: ``J1, J2, J3`` obeying the quaternion relations.

The structure group ``G_gamma`` (Sp, GL(C), GL(H) or GL) has Lie algebra
``g_gamma`` with Cartan decomposition ``k_gamma + p_gamma``; symmetric matrices
are projected orthogonally onto ``p_gamma`` by ``project_invariant``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .algebra import _as_matrix, expm

STRUCTURE_TOL = 1e-12
INTEGRABILITY_TOL = 1e-10


class StructureKind(str, Enum):
    NONE = "none"
    SYMPLECTIC = "symplectic"
    COMPLEX = "complex"
    HYPERCOMPLEX = "hypercomplex"


@dataclass(frozen=True)
class GeomStructure:
    """A structure ``gamma`` on R^dim given by its orthogonal complex maps."""

    kind: StructureKind
    dim: int
    j_maps: tuple = ()

    def __post_init__(self):
        kind = StructureKind(self.kind)
        object.__setattr__(self, "kind", kind)
        maps = tuple(np.array(_as_matrix(j, self.dim)) for j in self.j_maps)
        for j in maps:
            j.setflags(write=False)
        object.__setattr__(self, "j_maps", maps)
        expected = {StructureKind.NONE: 0, StructureKind.SYMPLECTIC: 1,
                    StructureKind.COMPLEX: 1, StructureKind.HYPERCOMPLEX: 3}[kind]
        if len(maps) != expected:
            raise ValueError(f"{kind.value} structure needs {expected} maps, got {len(maps)}")
        if kind is not StructureKind.NONE and self.dim % 2:
            raise ValueError(f"{kind.value} structure needs even dimension, got {self.dim}")
        if kind is StructureKind.HYPERCOMPLEX and self.dim % 4:
            raise ValueError(f"hypercomplex structure needs dimension divisible by 4, got {self.dim}")
        eye = np.eye(self.dim)
        for j in maps:
            if np.abs(j @ j + eye).max() > STRUCTURE_TOL:
                raise ValueError("structure map does not square to -I")
            if np.abs(j.T @ j - eye).max() > STRUCTURE_TOL:
                raise ValueError("structure map is not orthogonal")
        if kind is StructureKind.HYPERCOMPLEX:
            j1, j2, j3 = maps
            if np.abs(j1 @ j2 - j3).max() > STRUCTURE_TOL or np.abs(j2 @ j1 + j3).max() > STRUCTURE_TOL:
                raise ValueError("hypercomplex maps violate J1 J2 = J3 = -J2 J1")

    @property
    def J(self):
        """The single structure map of a symplectic or complex structure."""
        if len(self.j_maps) != 1:
            raise ValueError(f"{self.kind.value} structure has no single J")
        return self.j_maps[0]

    @property
    def omega(self):
        """Matrix of the symplectic form, ``omega(X, Y) = X^T omega Y``."""
        if self.kind is not StructureKind.SYMPLECTIC:
            raise ValueError("omega is only defined for symplectic structures")
        return self.j_maps[0]


def no_structure(n):
    return GeomStructure(StructureKind.NONE, n, ())


def standard_symplectic(n):
    """``J`` with ``J e_k = e_{n+1-k}`` for ``k <= n/2`` (and ``-e_{n+1-k}`` beyond)."""
    if n % 2 or n <= 0:
        raise ValueError(f"symplectic structure needs positive even dimension, got {n}")
    j = np.zeros((n, n))
    for k in range(n // 2):
        j[n - 1 - k, k] = 1.0
        j[k, n - 1 - k] = -1.0
    return GeomStructure(StructureKind.SYMPLECTIC, n, (j,))


def standard_complex(n):
    """Block-diagonal ``J`` made of 2x2 rotations ``[[0, -1], [1, 0]]``."""
    if n % 2 or n <= 0:
        raise ValueError(f"complex structure needs positive even dimension, got {n}")
    j = np.kron(np.eye(n // 2), np.array([[0.0, -1.0], [1.0, 0.0]]))
    return GeomStructure(StructureKind.COMPLEX, n, (j,))


_Q1 = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
_Q2 = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float)
_Q3 = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float)


def quaternion_blocks():
    """The three 4x4 blocks used by ``standard_hypercomplex``."""
    return _Q1.copy(), _Q2.copy(), _Q3.copy()


def standard_hypercomplex(n):
    """Block-diagonal copies of the standard quaternionic triple on each R^4."""
    if n % 4 or n <= 0:
        raise ValueError(f"hypercomplex structure needs dimension divisible by 4, got {n}")
    eye = np.eye(n // 4)
    return GeomStructure(StructureKind.HYPERCOMPLEX, n, tuple(np.kron(eye, q) for q in (_Q1, _Q2, _Q3)))


def standard_structure(kind, n):
    kind = StructureKind(kind)
    return {
        StructureKind.NONE: no_structure,
        StructureKind.SYMPLECTIC: standard_symplectic,
        StructureKind.COMPLEX: standard_complex,
        StructureKind.HYPERCOMPLEX: standard_hypercomplex,
    }[kind](n)


def _require_kind(gamma, kind):
    if gamma.kind is not kind:
        raise ValueError(f"expected a {kind.value} structure, got {gamma.kind.value}")


def symplectic_closed_residual(mu, gamma):
    """Largest cyclic sum ``omega(mu(X_i,X_j),X_k) + cyclic`` over ``1 + |mu|``."""
    _require_kind(gamma, StructureKind.SYMPLECTIC)
    w = np.einsum("ijk,kl->ijl", mu.coeffs, gamma.omega)
    cyc = w + w.transpose(1, 2, 0) + w.transpose(2, 0, 1)
    return float(np.abs(cyc).max() / (1.0 + mu.norm()))


def _check_almost_complex(j, n):
    j = _as_matrix(j, n)
    if np.abs(j @ j + np.eye(n)).max() > 1e-10:
        raise ValueError("J does not square to -I")
    return j


def _twist(c, a, b):
    """Coefficients of ``(X, Y) -> mu(aX, bY)``."""
    return np.einsum("pi,qj,pqk->ijk", a, b, c)


def _apply_out(c, a):
    """Coefficients of ``(X, Y) -> a mu(X, Y)``."""
    return np.einsum("ijl,kl->ijk", c, a)


def nijenhuis_tensor(mu, j):
    """``N(X,Y) = mu(JX,JY) - mu(X,Y) - J mu(JX,Y) - J mu(X,JY)`` as a 3-tensor."""
    j = _check_almost_complex(j, mu.dim)
    c = mu.coeffs
    eye = np.eye(mu.dim)
    return _twist(c, j, j) - c - _apply_out(_twist(c, j, eye), j) - _apply_out(_twist(c, eye, j), j)


def nijenhuis_residual(mu, j):
    """Largest Nijenhuis component over ``1 + |mu|``; zero iff ``J`` is integrable."""
    return float(np.abs(nijenhuis_tensor(mu, j)).max() / (1.0 + mu.norm()))


def hypercomplex_residual(mu, gamma):
    """Largest of the three Nijenhuis residuals of a hypercomplex triple."""
    _require_kind(gamma, StructureKind.HYPERCOMPLEX)
    return max(nijenhuis_residual(mu, j) for j in gamma.j_maps)


def integrability_residual(mu, gamma):
    """Residual of the defining condition of ``gamma`` (0 for no structure)."""
    if gamma.kind is StructureKind.SYMPLECTIC:
        return symplectic_closed_residual(mu, gamma)
    if gamma.kind is StructureKind.COMPLEX:
        return nijenhuis_residual(mu, gamma.J)
    if gamma.kind is StructureKind.HYPERCOMPLEX:
        return hypercomplex_residual(mu, gamma)
    return 0.0


@dataclass(frozen=True)
class ComplexFlags:
    abelian: bool
    biinvariant: bool
    abelian_residual: float
    biinvariant_residual: float


def classify_complex_flags(mu, j, tol=INTEGRABILITY_TOL):
    """Abelian means ``mu(J.,J.) = mu``; bi-invariant means ``mu(J.,.) = J mu(.,.)``."""
    j = _check_almost_complex(j, mu.dim)
    c = mu.coeffs
    eye = np.eye(mu.dim)
    scale = 1.0 + mu.norm()
    ab = float(np.abs(_twist(c, j, j) - c).max() / scale)
    bi = float(np.abs(_twist(c, j, eye) - _apply_out(c, j)).max() / scale)
    return ComplexFlags(ab <= tol, bi <= tol, ab, bi)


def _require_symmetric(a):
    a = _as_matrix(a)
    if np.abs(a - a.T).max() > 1e-10 * max(1.0, np.abs(a).max()):
        raise ValueError("operator is not symmetric")
    return a


def invariant_part(a, gamma):
    """Apply the ``p_gamma`` projection formula to any square matrix.

    The formula is conjugation-equivariant, so it also gives the invariant
    part of an operator that is self-adjoint for a different compatible metric.
    """
    a = _as_matrix(a, gamma.dim)
    if gamma.kind is StructureKind.NONE:
        return a.copy()
    if gamma.kind is StructureKind.SYMPLECTIC:
        j = gamma.J
        return 0.5 * (a + j @ a @ j)
    if gamma.kind is StructureKind.COMPLEX:
        j = gamma.J
        return 0.5 * (a - j @ a @ j)
    return 0.25 * (a - sum(j @ a @ j for j in gamma.j_maps))


def project_invariant(a, gamma):
    """Orthogonal projection of a symmetric matrix onto ``p_gamma``.

    None: ``A``; symplectic: ``(A + JAJ)/2``; complex: ``(A - JAJ)/2``;
    hypercomplex: ``(A - J1 A J1 - J2 A J2 - J3 A J3)/4``.
    """
    out = invariant_part(_require_symmetric(a), gamma)
    return 0.5 * (out + out.T)


def project_structure_algebra(a, gamma):
    """Orthogonal projection of any square matrix onto ``g_gamma``."""
    a = _as_matrix(a, gamma.dim)
    if gamma.kind is StructureKind.NONE:
        return a.copy()
    if gamma.kind is StructureKind.SYMPLECTIC:
        j = gamma.J
        return 0.5 * (a + j @ a.T @ j)
    if gamma.kind is StructureKind.COMPLEX:
        j = gamma.J
        return 0.5 * (a - j @ a @ j)
    return 0.25 * (a - sum(j @ a @ j for j in gamma.j_maps))


def structure_algebra_basis(gamma):
    """Orthonormal basis of ``g_gamma`` (array of shape ``(m, n, n)``)."""
    n = gamma.dim
    cols = []
    for a in range(n):
        for b in range(n):
            e = np.zeros((n, n))
            e[a, b] = 1.0
            cols.append(project_structure_algebra(e, gamma).ravel())
    u, s, _ = np.linalg.svd(np.array(cols).T, full_matrices=False)
    basis = u[:, s > 1e-10]
    return basis.T.reshape(-1, n, n)


def structure_algebra_residual(a, gamma):
    """Membership residual of ``a`` in ``g_gamma`` (Frobenius norm)."""
    a = _as_matrix(a, gamma.dim)
    if gamma.kind is StructureKind.NONE:
        return 0.0
    if gamma.kind is StructureKind.SYMPLECTIC:
        j = gamma.J
        return float(np.linalg.norm(a.T @ j + j @ a))
    return float(max(np.linalg.norm(a @ j - j @ a) for j in gamma.j_maps))


def preserves_structure_residual(g, gamma):
    """How far ``g`` is from ``G_gamma``: ``g^T J g - J`` or ``g J - J g``."""
    g = _as_matrix(g, gamma.dim)
    if gamma.kind is StructureKind.NONE:
        return 0.0
    if gamma.kind is StructureKind.SYMPLECTIC:
        j = gamma.J
        return float(np.abs(g.T @ j @ g - j).max())
    return float(max(np.abs(g @ j - j @ g).max() for j in gamma.j_maps))


def _random_algebra_element(gamma, rng):
    n = gamma.dim
    b = project_structure_algebra(rng.standard_normal((n, n)), gamma)
    nrm = np.linalg.norm(b)
    return b / nrm if nrm > 0 else b


def random_structure_group_element(gamma, scale, seed=None):
    """Sample ``exp(scale * B)`` with ``B`` a unit-norm random element of ``g_gamma``.

    ``scale`` is capped at 2 to keep condition numbers moderate.
    """
    if scale < 0:
        raise ValueError("scale must be non-negative")
    rng = np.random.default_rng(seed)
    b = _random_algebra_element(gamma, rng)
    return expm(min(float(scale), 2.0) * b)


def random_structure_orthogonal(gamma, seed=None, scale=np.pi):
    """Sample an orthogonal element of ``G_gamma`` (the compact group ``K_gamma``)."""
    rng = np.random.default_rng(seed)
    b = _random_algebra_element(gamma, rng)
    skew = 0.5 * (b - b.T)
    nrm = np.linalg.norm(skew)
    if nrm > 0:
        skew = skew / nrm
    return expm(float(scale) * skew)
