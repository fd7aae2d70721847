"""Brute-force numerical oracle on truncated Fock space.

Polynomials are mapped to dense matrices acting on n modes with per-mode
occupation 0..N-1; identities are compared on a guarded subspace that
excludes the truncation-corrupted top occupation levels, which makes the
truncation error exactly zero for polynomial identities instead of merely
small.  The oracle is restricted to theta = I.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .algebra import OperatorPolynomial

ORACLE_TOL = 1e-9
MAX_DIMENSION = 4096


def _require_canonical(p: OperatorPolynomial):
    if not p.algebra.theta.is_identity:
        raise ValueError("the oracle requires theta = I")


def _mode_matrix(truncation: int) -> np.ndarray:
    a = np.zeros((truncation, truncation), dtype=complex)
    for k in range(1, truncation):
        a[k - 1, k] = np.sqrt(k)
    return a


def _lifted_modes(n_modes: int, truncation: int):
    """Annihilation matrices for each mode on the full tensor-product space."""
    single = _mode_matrix(truncation)
    eye = np.eye(truncation)
    out = []
    for i in range(n_modes):
        factors = [single if j == i else eye for j in range(n_modes)]
        full = factors[0]
        for f in factors[1:]:
            full = np.kron(full, f)
        out.append(full)
    return out


def represent(p: OperatorPolynomial, truncation: int) -> np.ndarray:
    """Dense matrix of a polynomial at the given per-mode truncation."""
    _require_canonical(p)
    if truncation < p.max_degree + 2:
        raise ValueError(
            f"truncation {truncation} too small for degree {p.max_degree}"
        )
    n = p.algebra.modes
    dim = truncation**n
    if dim > MAX_DIMENSION:
        raise ValueError(f"representation dimension {dim} exceeds {MAX_DIMENSION}")
    modes = _lifted_modes(n, truncation)
    out = np.zeros((dim, dim), dtype=complex)
    for mono, coeff in p.terms.items():
        term = np.eye(dim, dtype=complex)
        for i, h in enumerate(mono.creation):
            for _ in range(h):
                term = term @ modes[i].conj().T
        for i, k in enumerate(mono.annihilation):
            for _ in range(k):
                term = term @ modes[i]
        out += coeff.to_complex() * term
    return out


def guarded_indices(n_modes: int, truncation: int, guard: int) -> np.ndarray:
    """State indices whose every mode occupation is at most N - 1 - guard."""
    if guard >= truncation:
        raise ValueError("guard band larger than the truncation")
    cap = truncation - 1 - guard
    idx = []
    for occ in product(range(truncation), repeat=n_modes):
        if all(o <= cap for o in occ):
            flat = 0
            for o in occ:
                flat = flat * truncation + o
            idx.append(flat)
    return np.array(idx, dtype=int)


def verify_identity(
    p: OperatorPolynomial,
    q: OperatorPolynomial,
    truncation: int,
    guard: int,
):
    """Compare two polynomials on the guarded subspace.

    Returns (passed, max_deviation).  The guard must dominate both total
    degrees so that no compared entry touches truncated levels.
    """
    p.algebra.require_compatible(q.algebra)
    if guard < max(p.max_degree, q.max_degree):
        raise ValueError("guard band smaller than the polynomial degree")
    mp = represent(p, truncation)
    mq = represent(q, truncation)
    idx = guarded_indices(p.algebra.modes, truncation, guard)
    sub = np.ix_(idx, idx)
    deviation = float(np.max(np.abs(mp[sub] - mq[sub]))) if idx.size else 0.0
    return deviation <= ORACLE_TOL, deviation


def psd_check(phi: OperatorPolynomial, truncation: int, guard: int):
    """Minimum eigenvalue of the guarded restriction of a self-adjoint polynomial."""
    if not (phi.adjoint() - phi).is_zero:
        raise ValueError("positivity check needs a self-adjoint polynomial")
    mat = represent(phi, truncation)
    idx = guarded_indices(phi.algebra.modes, truncation, guard)
    sub = mat[np.ix_(idx, idx)]
    min_eig = float(np.linalg.eigvalsh(sub).min()) if idx.size else 0.0
    return min_eig >= -ORACLE_TOL, min_eig
