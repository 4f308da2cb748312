"""
Structure-constant tensors and the linear algebra around them.

A bracket ``mu`` on R^n is stored densely as ``c[i, j, k]``, the coefficient of
``X_k`` in ``mu(X_i, X_j)`` with respect to a fixed orthonormal basis.  Indices
are zero-based in code; documents and printed tables use one-based labels.

GL(n) acts on brackets by ``g.mu(X, Y) = g mu(g^-1 X, g^-1 Y)`` and the
differential of this action at the identity is ``A.mu = -delta_mu(A)``, so that
the derivation algebra is exactly the kernel of ``delta_mu``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotLieBracket, NotNilpotent

DEFAULT_TOL = 1e-9
MAX_CONDITION = 1e12


class BracketTensor:
    """An antisymmetric bilinear map R^n x R^n -> R^n given by structure constants.

    Parameters
    ----------
    coeffs : array_like, shape (n, n, n)
        ``coeffs[i, j, k]`` is the coefficient of ``X_k`` in ``mu(X_i, X_j)``.
    atol : float
        Antisymmetry tolerance, relative to the largest coefficient.

    The coefficient array is copied and frozen, so instances are immutable.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs, atol=1e-12):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] == 0:
            raise ValueError(f"structure constants must have shape (n, n, n), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("structure constants must be finite")
        scale = max(1.0, float(np.abs(c).max()))
        skew = np.abs(c + c.transpose(1, 0, 2)).max()
        if skew > atol * scale:
            raise ValueError(f"structure constants are not antisymmetric in (i, j) (defect {skew:.3g})")
        c = 0.5 * (c - c.transpose(1, 0, 2))
        c.setflags(write=False)
        self._c = c

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((n, n, n)))

    @classmethod
    def from_brackets(cls, n, table):
        """Build from ``(i, j, k, value)`` entries with one-based indices.

        Each entry sets ``mu(X_i, X_j) += value X_k`` and the antisymmetric
        partner ``mu(X_j, X_i) -= value X_k``.
        """
        c = np.zeros((n, n, n))
        for i, j, k, v in table:
            if i == j:
                raise ValueError(f"bracket entry ({i}, {j}, {k}) has i == j")
            for idx in (i, j, k):
                if not 1 <= idx <= n:
                    raise ValueError(f"index {idx} out of range 1..{n}")
            c[i - 1, j - 1, k - 1] += v
            c[j - 1, i - 1, k - 1] -= v
        return cls(c)

    @property
    def coeffs(self):
        return self._c

    @property
    def dim(self):
        return self._c.shape[0]

    def norm(self):
        """Norm induced by ``v_inner`` (sum over all ordered index pairs)."""
        return float(np.sqrt(np.sum(self._c * self._c)))

    def normalized(self):
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero bracket")
        return BracketTensor(self._c / nrm)

    def is_zero(self):
        return not np.any(self._c)

    def bracket(self, x, y):
        """Evaluate ``mu(x, y)`` on coordinate vectors."""
        return np.einsum("i,j,ijk->k", x, y, self._c)

    def ad(self, i):
        """Matrix of ``ad X_i = mu(X_i, .)`` (zero-based index)."""
        return self._c[i].T.copy()

    def nonzero_entries(self, tol=0.0):
        """One-based ``(i, j, k, value)`` with ``i < j`` and ``|value| > tol``."""
        n = self.dim
        out = []
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    v = float(self._c[i, j, k])
                    if abs(v) > tol:
                        out.append((i + 1, j + 1, k + 1, v))
        return out

    def __add__(self, other):
        _check_same_dim(self, other)
        return BracketTensor(self._c + other._c)

    def __sub__(self, other):
        _check_same_dim(self, other)
        return BracketTensor(self._c - other._c)

    def __neg__(self):
        return BracketTensor(-self._c)

    def __mul__(self, t):
        return BracketTensor(float(t) * self._c)

    __rmul__ = __mul__

    def __truediv__(self, t):
        return BracketTensor(self._c / float(t))

    def __eq__(self, other):
        return isinstance(other, BracketTensor) and np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        terms = ", ".join(f"[{i}{j}]->{v:g}X{k}" for i, j, k, v in self.nonzero_entries())
        return f"BracketTensor(n={self.dim}; {terms or 'abelian'})"


def _check_same_dim(mu, lam):
    if mu.dim != lam.dim:
        raise ValueError(f"dimension mismatch: {mu.dim} vs {lam.dim}")


def _as_matrix(a, n=None):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if n is not None and a.shape[0] != n:
        raise ValueError(f"expected a {n}x{n} matrix, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def v_inner(mu, lam):
    """Euclidean inner product of two brackets, summed over all ordered pairs."""
    _check_same_dim(mu, lam)
    return float(np.sum(mu.coeffs * lam.coeffs))


def gl_act(g, mu, max_condition=MAX_CONDITION):
    """Return ``g.mu``, i.e. ``(X, Y) -> g mu(g^-1 X, g^-1 Y)``."""
    g = _as_matrix(g, mu.dim)
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > max_condition:
        raise ValueError(f"matrix is singular or ill-conditioned (cond = {cond:.3g})")
    gi = np.linalg.inv(g)
    # c'[i, j, k] = sum gi[a, i] gi[b, j] c[a, b, l] g[k, l], contracted one index at a time
    t = np.tensordot(mu.coeffs, g, axes=([2], [1]))
    t = np.tensordot(gi, t, axes=([0], [0]))
    c = np.tensordot(gi, t, axes=([0], [1])).transpose(1, 0, 2)
    return BracketTensor(c, atol=1e-9)


def delta(mu, a):
    """Return ``delta_mu(A) = -A.mu``.

    ``delta_mu(A)(X, Y) = -A mu(X, Y) + mu(AX, Y) + mu(X, AY)``; it vanishes
    exactly when ``A`` is a derivation of ``mu``.
    """
    a = _as_matrix(a, mu.dim)
    c = mu.coeffs
    out = (
        -np.einsum("ijl,kl->ijk", c, a)
        + np.einsum("ai,ajk->ijk", a, c)
        + np.einsum("aj,iak->ijk", a, c)
    )
    return BracketTensor(out, atol=1e-9)


def delta_matrix(mu):
    """Matrix of the linear map ``A -> delta_mu(A)``.

    Rows index the independent entries ``(i < j, k)`` of a bracket, columns
    index the entries of ``A`` in row-major order.
    """
    n = mu.dim
    c = mu.coeffs
    eye = np.eye(n)
    # d[i, j, k, a, b] = delta_mu(E_ab)[i, j, k]
    d = (
        -np.einsum("ijb,ka->ijkab", c, eye)
        + np.einsum("ib,ajk->ijkab", eye, c)
        + np.einsum("jb,iak->ijkab", eye, c)
    )
    iu, ju = np.triu_indices(n, k=1)
    return d[iu, ju].reshape(len(iu) * n, n * n)


def jacobi_residual(mu):
    """Largest Jacobi defect over basis triples, divided by ``1 + |mu|^2``."""
    c = mu.coeffs
    t = np.einsum("ijl,lkm->ijkm", c, c)
    cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.abs(cyc).max() / (1.0 + mu.norm() ** 2))


def _orth_range(vectors, cutoff):
    """Orthonormal basis (columns) for the span of the given column vectors."""
    if vectors.size == 0:
        return vectors.reshape(vectors.shape[0], 0)
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    return u[:, s > cutoff]


def lower_central_series(mu, tol=DEFAULT_TOL):
    """Dimensions of ``C^1 = n, C^{k+1} = mu(n, C^k)`` until it vanishes or stalls."""
    n = mu.dim
    cutoff = tol * mu.norm()
    basis = np.eye(n)
    dims = [n]
    while basis.shape[1] > 0:
        # images mu(X_i, v) for every basis vector X_i and every v in C^k
        images = np.einsum("ijk,jr->kir", mu.coeffs, basis).reshape(n, -1)
        basis = _orth_range(images, cutoff) if cutoff > 0 else images[:, :0]
        if basis.shape[1] == dims[-1]:
            dims.append(basis.shape[1])
            break
        dims.append(basis.shape[1])
    return dims


def nilpotency_index(mu, tol=DEFAULT_TOL, check_jacobi=True):
    """Smallest ``s`` with ``C^{s+1} = 0`` (so abelian -> 1, Heisenberg -> 2).

    Raises ``NotNilpotent`` when the series stops shrinking before reaching
    zero and ``NotLieBracket`` when ``check_jacobi`` is set and Jacobi fails.
    """
    if check_jacobi and jacobi_residual(mu) > tol:
        raise NotLieBracket(f"Jacobi residual {jacobi_residual(mu):.3g} exceeds {tol:g}")
    dims = lower_central_series(mu, tol)
    if dims[-1] != 0:
        raise NotNilpotent(f"lower central series stabilizes at dimension {dims[-1]}")
    return len(dims) - 1


def nullspace(m, tol=DEFAULT_TOL):
    """Orthonormal basis (columns) of the numerical kernel of ``m``.

    Singular values at most ``tol * sigma_max`` count as zero.
    """
    m = np.atleast_2d(m)
    ncols = m.shape[1]
    if m.size == 0 or not np.any(m):
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > tol * s[0]))
    return vt[rank:].T.copy()


@dataclass(frozen=True)
class DerivationBasis:
    """Orthonormal basis of Der(mu) under the trace form ``tr(A^T B)``."""

    bracket: BracketTensor
    maps: tuple
    tol: float

    @property
    def dim(self):
        return len(self.maps)

    def as_array(self):
        n = self.bracket.dim
        if not self.maps:
            return np.zeros((0, n, n))
        return np.array(self.maps)

    def project(self, a):
        """Orthogonal projection of a matrix onto the span of the basis."""
        a = np.asarray(a, dtype=float)
        out = np.zeros_like(a)
        for d in self.maps:
            out += np.sum(d * a) * d
        return out

    def contains(self, a, tol=1e-8):
        """Whether ``a`` lies in the span, relative to its norm."""
        a = np.asarray(a, dtype=float)
        nrm = np.linalg.norm(a)
        if nrm == 0.0:
            return True
        return bool(np.linalg.norm(a - self.project(a)) <= tol * nrm)


def derivation_basis(mu, tol=DEFAULT_TOL):
    """Numerical kernel of ``A -> delta_mu(A)`` as a ``DerivationBasis``."""
    n = mu.dim
    ker = nullspace(delta_matrix(mu), tol)
    maps = tuple(ker[:, r].reshape(n, n) for r in range(ker.shape[1]))
    return DerivationBasis(mu, maps, tol)


def symmetric_derivations(mu, tol=DEFAULT_TOL):
    """Orthonormal basis of the symmetric derivations of ``mu``."""
    n = mu.dim
    sym = []
    for a in range(n):
        for b in range(a, n):
            e = np.zeros((n, n))
            e[a, b] = e[b, a] = 1.0
            sym.append(e / np.linalg.norm(e))
    sym = np.array(sym).reshape(len(sym), n * n).T
    m = delta_matrix(mu) @ sym
    ker = sym @ nullspace(m, tol)
    return [ker[:, r].reshape(n, n) for r in range(ker.shape[1])]


def expm(a):
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    return scipy.linalg.expm(np.asarray(a, dtype=float))
