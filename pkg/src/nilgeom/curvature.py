"""
Curvature of the left-invariant metric attached to a nilpotent bracket.

With the fixed inner product on R^n, a nilpotent bracket ``mu`` determines a
Riemannian nilmanifold whose Ricci operator is the quadratic expression in
``ricci``.  The same data, read as a moment map for the GL(n) action, gives
``m(mu) = 8 Ric_mu``.  Projecting onto ``p_gamma`` gives the invariant Ricci
operator ``Ric^gamma`` of a structure ``gamma``.

For 2-step brackets the j-maps ``<j(Z) X, Y> = <mu(X, Y), Z>`` encode the same
information as the bracket itself and give the modified H-type test.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, _orth_range
from .errors import InternalConsistencyError, NotTwoStep
from .structures import project_invariant


def ricci(mu):
    """Ricci operator of the metric defined by ``mu`` and the fixed inner product."""
    c = mu.coeffs
    r = -0.5 * np.einsum("xil,yil->xy", c, c) + 0.25 * np.einsum("ijx,ijy->xy", c, c)
    return 0.5 * (r + r.T)


def scalar_curvature(mu):
    """``tr Ric``; for a nilpotent bracket this is ``-|mu|^2 / 4``."""
    scal = float(np.trace(ricci(mu)))
    expected = -0.25 * mu.norm() ** 2
    if abs(scal - expected) > 1e-12 * max(1.0, abs(expected)):
        raise InternalConsistencyError(f"trace of Ricci {scal!r} differs from -|mu|^2/4 = {expected!r}")
    return scal


def moment_map(mu):
    """``m(mu) = -4 sum ad_i^T ad_i + 2 sum ad_i ad_i^T``."""
    ads = mu.coeffs.transpose(0, 2, 1)  # ads[i] = ad X_i
    m = -4.0 * np.einsum("iab,iac->bc", ads, ads) + 2.0 * np.einsum("iab,icb->ac", ads, ads)
    return 0.5 * (m + m.T)


def invariant_ricci(mu, gamma):
    """``Ric^gamma``: the Ricci operator projected onto ``p_gamma``."""
    return project_invariant(ricci(mu), gamma)


def F_value(mu, gamma):
    """Scale-invariant functional ``tr((Ric^gamma)^2) / |mu|^4``."""
    nrm2 = mu.norm() ** 2
    if nrm2 == 0.0:
        raise ValueError("F is undefined at the zero bracket")
    r = invariant_ricci(mu, gamma)
    return float(np.sum(r * r) / nrm2**2)


@dataclass(frozen=True)
class CenterSplitting:
    """Orthogonal splitting ``n = n1 + n2`` with ``mu(n, n) in n2`` and ``n2`` central.

    ``n1`` and ``n2`` hold orthonormal bases as columns.  When both are spanned
    by coordinate vectors, ``n1_indices`` / ``n2_indices`` give the zero-based
    coordinates (otherwise they are ``None``).
    """

    n1: np.ndarray
    n2: np.ndarray
    n1_indices: tuple = None
    n2_indices: tuple = None

    @property
    def dims(self):
        return self.n1.shape[1], self.n2.shape[1]

    def contains_center_vector(self, z, tol=1e-9):
        z = np.asarray(z, dtype=float)
        nrm = np.linalg.norm(z)
        if nrm == 0.0:
            return True
        return bool(np.linalg.norm(z - self.n2 @ (self.n2.T @ z)) <= tol * nrm)

    @classmethod
    def from_indices(cls, mu, n2_indices, tol=DEFAULT_TOL):
        """Splitting with ``n2`` spanned by the given zero-based coordinates."""
        n = mu.dim
        n2_idx = tuple(sorted(int(i) for i in n2_indices))
        n1_idx = tuple(i for i in range(n) if i not in n2_idx)
        eye = np.eye(n)
        s = cls(eye[:, list(n1_idx)], eye[:, list(n2_idx)], n1_idx, n2_idx)
        _verify_splitting(mu, s, tol)
        return s


def _coordinate_indices(basis, tol=1e-10):
    """Coordinates spanning the column space of ``basis``, if it is coordinate-aligned."""
    proj = basis @ basis.T
    d = np.diag(proj)
    if np.abs(proj - np.diag(d)).max() > tol or np.any(np.minimum(np.abs(d), np.abs(d - 1)) > tol):
        return None
    return tuple(int(i) for i in np.flatnonzero(d > 0.5))


def _verify_splitting(mu, s, tol):
    c = mu.coeffs
    scale = tol * max(mu.norm(), 1e-300)
    if s.n1.shape[1]:
        leak = np.einsum("ijk,kr->ijr", c, s.n1)
        if np.abs(leak).max() > scale:
            raise NotTwoStep("bracket image is not contained in n2")
    if s.n2.shape[1]:
        central = np.einsum("ijk,jr->irk", c, s.n2)
        if np.abs(central).max() > scale:
            raise NotTwoStep("n2 is not central")


def detect_center_splitting(mu, tol=DEFAULT_TOL, mode="image"):
    """Split a 2-step bracket as ``n1 + n2``.

    ``mode="image"`` takes ``n2 = mu(n, n)``.  ``mode="center"`` takes the whole
    center (the kernel of ``ad``), which adds abelian factors to ``n2``.
    Raises ``NotTwoStep`` when the chosen ``n2`` is not central.
    """
    n = mu.dim
    c = mu.coeffs
    cutoff = tol * mu.norm()
    if mode == "image":
        vectors = c.reshape(n * n, n).T
        n2 = _orth_range(vectors, cutoff) if cutoff > 0 else np.zeros((n, 0))
    elif mode == "center":
        # X is central iff mu(X_i, X) = 0 for all i
        m = c.transpose(0, 2, 1).reshape(n * n, n)
        if cutoff == 0:
            n2 = np.eye(n)
        else:
            _, s, vt = np.linalg.svd(m, full_matrices=True)
            rank = int(np.sum(s > cutoff))
            n2 = vt[rank:].T
    else:
        raise ValueError(f"unknown mode {mode!r}")
    idx = _coordinate_indices(n2)
    eye = np.eye(n)
    if idx is not None:
        n2 = eye[:, list(idx)]
        n1_idx = tuple(i for i in range(n) if i not in idx)
        s = CenterSplitting(eye[:, list(n1_idx)], n2, n1_idx, idx)
    else:
        u, _, _ = np.linalg.svd(n2, full_matrices=True)
        s = CenterSplitting(u[:, n2.shape[1]:], n2)
    _verify_splitting(mu, s, tol)
    return s


def j_map(mu, s, z, tol=1e-9):
    """Skew map ``j(Z)`` on ``n1`` (in the basis ``s.n1``) with ``<j(Z)X, Y> = <mu(X, Y), Z>``."""
    z = np.asarray(z, dtype=float)
    if z.shape == (s.n2.shape[1],):
        z = s.n2 @ z
    if z.shape != (mu.dim,):
        raise ValueError(f"Z must be an ambient vector of length {mu.dim}")
    if not s.contains_center_vector(z, tol):
        raise ValueError("Z does not lie in n2")
    u = s.n1
    # j[y, x] = <mu(u_x, u_y), Z>
    return np.einsum("ax,by,abk,k->yx", u, u, mu.coeffs, z)


def j_form(mu, s):
    """Gram matrix ``-tr(j(Z_a) j(Z_b)) / 2`` over the orthonormal basis of ``n2``."""
    js = [j_map(mu, s, s.n2[:, a]) for a in range(s.n2.shape[1])]
    q = len(js)
    g = np.zeros((q, q))
    for a in range(q):
        for b in range(q):
            g[a, b] = -0.5 * np.trace(js[a] @ js[b])
    return g


@dataclass(frozen=True)
class HTypeVerdict:
    """Outcome of the modified H-type test.

    ``form`` is the symmetric matrix ``C`` (in the ``n2`` basis) with
    ``j(Z)^2 = (Z^T C Z) I`` whenever ``is_htype`` holds.  ``degenerate``
    counts directions with ``c(Z) = 0``, which the weakened definition admits.
    """

    is_htype: bool
    form: np.ndarray
    max_residual: float
    degenerate: int
    samples: tuple


def modified_htype_check(mu, s=None, tol=1e-9, n_random=8, seed=0):
    """Test whether every ``j(Z)^2`` is a non-positive multiple of the identity.

    Without an explicit splitting the full center is used for ``n2``.
    """
    if s is None:
        s = detect_center_splitting(mu, mode="center")
    p, q = s.dims
    if q == 0 or p == 0:
        return HTypeVerdict(True, np.zeros((q, q)), 0.0, q, ())
    js = [j_map(mu, s, s.n2[:, a]) for a in range(q)]
    form = np.array([[np.trace(js[a] @ js[b]) / p for b in range(q)] for a in range(q)])
    form = 0.5 * (form + form.T)
    rng = np.random.default_rng(seed)
    coords = [np.eye(q)[a] for a in range(q)] + [rng.standard_normal(q) for _ in range(n_random)]
    # pairwise sums exercise the polarized identity j(Z)j(W) + j(W)j(Z) = 2 C(Z, W) I
    coords += [np.eye(q)[a] + np.eye(q)[b] for a in range(q) for b in range(a + 1, q)]
    scale = max(1.0, mu.norm() ** 2)
    worst = 0.0
    samples = []
    ok = True
    for zc in coords:
        zc = zc / np.linalg.norm(zc)
        jz = sum(w * jm for w, jm in zip(zc, js))
        sq = jz @ jz
        cz = np.trace(sq) / p
        resid = float(np.abs(sq - cz * np.eye(p)).max() / scale)
        worst = max(worst, resid)
        samples.append((tuple(float(x) for x in zc), float(cz)))
        if resid > tol or cz > tol * scale:
            ok = False
    evals = np.linalg.eigvalsh(form)
    degenerate = int(np.sum(np.abs(evals) <= tol * scale))
    return HTypeVerdict(ok, form, worst, degenerate, tuple(samples))
