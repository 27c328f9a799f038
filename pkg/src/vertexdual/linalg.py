"""Small dense-linear-algebra helpers used across the package.

Polynomial coefficient arrays follow the ``numpy.poly`` convention:
highest power first, leading coefficient 1 for monic polynomials.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.optimize import linear_sum_assignment


def coth(z):
    return np.cosh(z) / np.sinh(z)


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def rel_commutator(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius norm of [a, b] relative to ||a|| ||b||."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.linalg.norm(a @ b - b @ a) / (na * nb))


def rel_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Max entrywise difference relative to the larger matrix scale."""
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0), 1e-300)
    return float(np.max(np.abs(a - b), initial=0.0) / scale)


def charpoly_from_eigs(a: np.ndarray) -> np.ndarray:
    """Coefficients of det(lambda*I - a) from the eigenvalues of ``a``."""
    return np.atleast_1d(np.poly(np.linalg.eigvals(a)))


def charpoly_minors(a: np.ndarray) -> np.ndarray:
    """Coefficients of det(lambda*I - a) summed from principal minors.

    Avoids the eigensolver entirely: the lambda^(n-k) coefficient is
    (-1)^k times the sum of all k x k diagonal minors, each evaluated by
    LU.  Exponential in n; intended for n <= ~8.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    for k in range(1, n + 1):
        s = 0.0 + 0.0j
        for sub in combinations(range(n), k):
            block = a[np.ix_(sub, sub)]
            s += block[0, 0] if k == 1 else np.linalg.det(block)
        coeffs[k] = (-1.0) ** k * s
    return coeffs


def poly_rel_residual(p: np.ndarray, q: np.ndarray) -> float:
    """Max coefficient difference relative to the largest coefficient."""
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    n = max(p.size, q.size)
    pp = np.concatenate([np.zeros(n - p.size, dtype=complex), p])
    qq = np.concatenate([np.zeros(n - q.size, dtype=complex), q])
    scale = max(np.max(np.abs(pp)), np.max(np.abs(qq)), 1e-300)
    return float(np.max(np.abs(pp - qq)) / scale)


def match_multisets(values: np.ndarray, targets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Minimal-cost assignment of ``values`` onto ``targets``.

    Cost is the distance relative to the target magnitude.  Returns the
    permutation (values[i] is matched to targets[perm[i]]) and the
    per-pair relative errors.
    """
    values = np.asarray(values)
    targets = np.asarray(targets)
    cost = np.abs(values[:, None] - targets[None, :]) / np.maximum(np.abs(targets[None, :]), 1e-12)
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(values), dtype=int)
    perm[rows] = cols
    return perm, cost[rows, cols]


def reduce_mod_ipi(z):
    """Shift by multiples of i*pi so that Im(z) lands in (-pi/2, pi/2]."""
    z = np.asarray(z, dtype=complex)
    shift = np.ceil((z.imag - np.pi / 2) / np.pi)
    return z - 1j * np.pi * shift


def ipi_distance(u, v) -> float:
    """Max distance between root tuples up to i*pi shifts and permutation."""
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if u.size != v.size:
        return np.inf
    if u.size == 0:
        return 0.0
    diff = u[:, None] - v[None, :]
    diff = diff - 1j * np.pi * np.round(diff.imag / np.pi)
    rows, cols = linear_sum_assignment(np.abs(diff))
    return float(np.max(np.abs(diff[rows, cols])))


def min_pairwise_sinh(x, eta=None) -> float:
    """min over i < j of |sinh(x_i - x_j)| (and the eta-shifted gaps if given)."""
    x = np.asarray(x, dtype=complex)
    n = x.size
    if n < 2:
        return np.inf
    best = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            d = x[i] - x[j]
            best = min(best, abs(np.sinh(d)))
            if eta is not None:
                best = min(best, abs(np.sinh(d + eta)), abs(np.sinh(d - eta)))
    return best


def lagrange_vandermonde_inverse(t: np.ndarray) -> np.ndarray:
    """Inverse transpose of the Vandermonde matrix V_ij = t_i^(j-1).

    Row k holds the coefficients (ascending powers) of the Lagrange
    basis polynomial through the nodes ``t``, so that the returned B
    satisfies B @ V^T = I.  Built from products of node differences,
    which stays accurate where LU on V^T would not.
    """
    t = np.asarray(t, dtype=complex)
    k = t.size
    out = np.empty((k, k), dtype=complex)
    for i in range(k):
        others = np.delete(t, i)
        # np.poly returns highest power first; flip to ascending.
        num = np.poly(others) if others.size else np.array([1.0 + 0.0j])
        den = np.prod(t[i] - others) if others.size else 1.0 + 0.0j
        out[i, :] = num[::-1] / den
    return out
