"""Dense linear-algebra helpers shared by every module.

Operators on C^d are vectorized by stacking columns, so that
``vec(a @ x @ b) == kron(b.T, a) @ vec(x)``.  Subspaces of operator space
are carried around as 2-d arrays whose *rows* are orthonormal vectors
(in the Hilbert-Schmidt inner product).
"""
import numpy as np
from scipy import linalg as la

TOL_RANK = 1e-9
TOL_EQ = 1e-8


def vec(x):
    return np.asarray(x).reshape(-1, order="F")


def unvec(v, dim):
    return np.asarray(v).reshape((dim, dim), order="F")


def vec_rows(mats):
    """Stack a sequence of d x d matrices as rows of vec()'d operators."""
    mats = np.asarray(mats)
    if mats.ndim == 2:
        mats = mats[None]
    return np.transpose(mats, (0, 2, 1)).reshape(len(mats), -1)


def unvec_rows(rows, dim):
    rows = np.asarray(rows)
    return np.transpose(rows.reshape(len(rows), dim, dim), (0, 2, 1))


def dagger(x):
    return np.conj(np.swapaxes(x, -1, -2))


def hs_norm(x):
    return float(np.linalg.norm(x))


def extend_basis(basis, candidates, tol=TOL_RANK):
    """Orthonormal rows spanning span(basis) + span(candidates).

    ``basis`` must already have orthonormal rows (or be None).  A candidate
    only contributes if its component orthogonal to the current span is
    larger than ``tol`` times its own norm; candidates smaller than ``tol``
    times the largest candidate are treated as numerical zeros.
    Returns the new rows only.
    """
    cands = np.atleast_2d(np.asarray(candidates, dtype=complex))
    n = cands.shape[1]
    if cands.shape[0] == 0:
        return np.zeros((0, n), dtype=complex)
    if basis is None:
        basis = np.zeros((0, n), dtype=complex)
    norms = np.linalg.norm(cands, axis=1)
    keep = norms > tol * norms.max() if norms.max() > 0 else norms > 0
    if not np.any(keep):
        return np.zeros((0, n), dtype=complex)
    cands = cands[keep] / norms[keep, None]
    for _ in range(2):
        if len(basis):
            cands = cands - (cands @ basis.conj().T) @ basis
    _, s, vh = np.linalg.svd(cands, full_matrices=False)
    new = vh[s > tol]
    if len(basis) and len(new):
        new = new - (new @ basis.conj().T) @ basis
        q, _ = np.linalg.qr(new.T)
        new = q.T
    return new


def orthonormal_basis(vectors, tol=TOL_RANK):
    return extend_basis(None, vectors, tol)


def nullspace(a, tol=TOL_RANK, atol=0.0):
    """Orthonormal rows spanning {v : a v = 0}; threshold relative to the
    largest singular value, with ``atol`` as an absolute floor so that a
    matrix of pure roundoff counts as zero."""
    a = np.atleast_2d(a)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=complex)
    if a.shape[0] > 2 * n:
        # tall stacks: same singular values and right vectors as R
        a = la.qr(a, mode="r", check_finite=False)[0][:n]
    _, s, vh = np.linalg.svd(a, full_matrices=a.shape[0] < n)
    if s.size == 0 or s[0] <= atol:
        return np.eye(n, dtype=complex)
    rank = int(np.sum(s > max(tol * s[0], atol)))
    return vh[rank:].conj()


def rank(a, tol=TOL_RANK):
    s = np.linalg.svd(np.atleast_2d(a), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def span_distance(a, b):
    """Sine of the largest principal angle between two row spans.

    Both inputs need orthonormal rows.  Spans of different dimension are
    at distance 1.
    """
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    if a.shape[0] != b.shape[0]:
        return 1.0
    if a.shape[0] == 0:
        return 0.0
    ra = a - (a @ b.conj().T) @ b
    rb = b - (b @ a.conj().T) @ a
    return float(max(np.linalg.norm(ra, 2), np.linalg.norm(rb, 2)))


def projection_residual(x, basis, floor=0.0):
    """Norm of the part of vector ``x`` outside the row span, relative to
    max(|x|, floor)."""
    x = np.asarray(x).ravel()
    nx = max(np.linalg.norm(x), floor)
    if nx == 0:
        return 0.0
    if len(basis) == 0:
        return 1.0
    r = x - basis.T @ (basis.conj() @ x)
    return float(np.linalg.norm(r) / nx)


def intersection_dim(a, b, tol=TOL_EQ):
    """Dimension of span(a) ∩ span(b) for orthonormal row bases.

    Singular values of [a; -b]^T that vanish correspond to shared
    directions; they scale like the principal angle, so ``tol`` acts as an
    angle threshold.
    """
    if len(a) == 0 or len(b) == 0:
        return 0
    m = np.vstack([a, -b]).T
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s <= tol))


def kron_rows(n, m):
    """Index helper: position of basis vector (a, mu) of C^n ⊗ C^m."""
    return lambda a, mu: a * m + mu


def partial_trace_second(x, n, m):
    """tr_m of an operator on C^n ⊗ C^m (kron ordering)."""
    return np.einsum("ajbj->ab", np.asarray(x).reshape(n, m, n, m))


def partial_trace_first(x, n, m):
    return np.einsum("iaib->ab", np.asarray(x).reshape(n, m, n, m))


def closest_unitary(a):
    u, _, vh = np.linalg.svd(a)
    return u @ vh


def expm(a):
    # Al-Mohy & Higham scaling-and-squaring with Pade approximants.
    return la.expm(a)


def random_unitary(d, rng):
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_hermitian(d, rng, scale=1.0):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (z + z.conj().T) / 2


def random_matrix(d, rng, scale=1.0):
    return scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)


def matrix_unit(d, i, j):
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def block_diag(*blocks):
    return la.block_diag(*blocks)


def trace_norm(x):
    return float(np.sum(np.linalg.svd(x, compute_uv=False)))
