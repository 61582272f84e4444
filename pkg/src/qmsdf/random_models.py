"""Seeded random GKSL models with a prescribed decoherence-free structure.

H = U^dag (⊕ K_i ⊗ 1 + 1 ⊗ M0_i) U and L_l = U^dag (⊕ 1 ⊗ M_l^(i)) U with
generic multiplicity-side data, so that N(T) is U^dag (⊕ B(C^n_i) ⊗ 1) U.
"""
from dataclasses import dataclass

import numpy as np

from . import _linalg as lin
from .model import GkslModel


@dataclass(frozen=True)
class PlantedModel:
    model: GkslModel
    blocks: tuple
    unitary: np.ndarray
    K: tuple
    M0: tuple
    M: tuple  # M[i][l]


def _traceless(x):
    return x - np.trace(x) / len(x) * np.eye(len(x))


def planted_model(blocks, seed, n_jumps=2, hermitian_jumps=False, rotate=True, k_scale=1.0):
    """Random model whose N(T) has the given (n_i, m_i) blocks.

    With ``hermitian_jumps`` the model is unital in both pictures, so 1/d
    is a faithful invariant state.
    """
    rng = np.random.default_rng(seed)
    d = sum(n * m for n, m in blocks)
    h = np.zeros((d, d), dtype=complex)
    ls = [np.zeros((d, d), dtype=complex) for _ in range(n_jumps)]
    ks, m0s, ms = [], [], []
    o = 0
    for n, m in blocks:
        k = lin.random_hermitian(n, rng, k_scale)
        m0 = _traceless(lin.random_hermitian(m, rng, 0.5)) if m > 1 else np.zeros((1, 1))
        mm = []
        for l in range(n_jumps):
            x = lin.random_hermitian(m, rng) if hermitian_jumps else lin.random_matrix(m, rng)
            mm.append(x)
            ls[l][o:o + n * m, o:o + n * m] = np.kron(np.eye(n), x)
        h[o:o + n * m, o:o + n * m] = np.kron(k, np.eye(m)) + np.kron(np.eye(n), m0)
        ks.append(k)
        m0s.append(m0)
        ms.append(tuple(mm))
        o += n * m
    u = lin.random_unitary(d, rng) if rotate else np.eye(d, dtype=complex)
    ud = u.conj().T
    model = GkslModel(d, ud @ h @ u, tuple(ud @ l @ u for l in ls))
    return PlantedModel(model, tuple(blocks), u, tuple(ks), tuple(m0s), tuple(ms))


def tensor_model(n, m, seed, n_jumps=2):
    """H = K ⊗ 1 + 1 ⊗ M0, L_l = 1 ⊗ M_l on C^n ⊗ C^m (no rotation)."""
    return planted_model([(n, m)], seed, n_jumps, hermitian_jumps=False, rotate=False)


def random_block_algebra_unitary(blocks, seed):
    rng = np.random.default_rng(seed)
    d = sum(n * m for n, m in blocks)
    return lin.random_unitary(d, rng)
