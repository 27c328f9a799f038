"""Determinant identities behind the spectral correspondence: the paired
N x N / M x M matrices, their ladder factorizations, the explicit
Vandermonde inverse, and the characteristic-polynomial identity that a
solved chain must satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bethe import BetheRootSet, all_eigenvalues_h, bae_defect
from .errors import GeneralPositionViolated, InvalidBetheRoots, SingularVandermonde
from .linalg import (
    charpoly_minors,
    lagrange_vandermonde_inverse,
    poly_rel_residual,
    rel_diff,
)
from .ruijsenaars import eta_shift_diagonal, lax_from_velocities, s_matrix, vandermonde_sym
from .spin_chain import ChainParams

_GP_TOL = 1e-6


@dataclass(frozen=True)
class IdentityParams:
    """Two point families x (N of them) and y (M <= N), a scale g, and eta."""

    N: int
    M: int
    x: tuple[complex, ...]
    y: tuple[complex, ...]
    g: complex
    eta: complex

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(complex(v) for v in self.x))
        object.__setattr__(self, "y", tuple(complex(v) for v in self.y))
        object.__setattr__(self, "g", complex(self.g))
        object.__setattr__(self, "eta", complex(self.eta))
        if self.N < 1 or not 0 <= self.M <= self.N:
            raise ValueError(f"need N >= 1 and 0 <= M <= N, got N={self.N}, M={self.M}")
        if len(self.x) != self.N or len(self.y) != self.M:
            raise ValueError("x, y lengths must match N, M")
        if self.g == 0:
            raise ValueError("g must be nonzero")
        _require_separated(self.x, self.eta, "x")
        _require_separated(self.y, self.eta, "y")
        for i, xi in enumerate(self.x):
            for a, ya in enumerate(self.y):
                if abs(np.sinh(xi - ya)) <= _GP_TOL or abs(np.sinh(xi - ya - self.eta)) <= _GP_TOL:
                    raise GeneralPositionViolated(f"x_{i + 1} too close to y_{a + 1} (mod eta)")
        _require_distinct_nodes(self.x, "e^(2x)")
        _require_distinct_nodes(self.y, "e^(2y)")


def _require_separated(pts, eta, name):
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = pts[i] - pts[j]
            for shift in (0.0, eta, -eta):
                if abs(np.sinh(d + shift)) <= _GP_TOL:
                    raise GeneralPositionViolated(
                        f"{name}_{i + 1} and {name}_{j + 1} too close (mod eta)"
                    )


def _require_distinct_nodes(pts, label):
    t = np.exp(2 * np.asarray(pts, dtype=complex))
    tmax = max(np.max(np.abs(t), initial=0.0), 1.0)
    for i in range(t.size):
        for j in range(i + 1, t.size):
            if abs(t[i] - t[j]) <= 1e-12 * tmax:
                raise SingularVandermonde(f"{label} nodes {i + 1} and {j + 1} coincide")


def _q_entrywise(x, y, g, eta) -> np.ndarray:
    """Row i carries the full interaction weight of point x_i; the column
    dependence sits only in the 1/sinh(x_j - x_i + eta) prefactor."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    n = x.size
    q = np.empty((n, n), dtype=complex)
    for i in range(n):
        weight = 1.0 + 0.0j
        for k in range(n):
            if k != i:
                weight *= np.sinh(x[i] - x[k] + eta) / np.sinh(x[i] - x[k])
        for ya in y:
            weight *= np.sinh(x[i] - ya) / np.sinh(x[i] - ya + eta)
        q[i, :] = g * np.sinh(eta) / np.sinh(x - x[i] + eta) * weight
    return q


def _q_tilde_entrywise(y, x, g, eta) -> np.ndarray:
    y = np.asarray(y, dtype=complex)
    x = np.asarray(x, dtype=complex)
    m = y.size
    q = np.empty((m, m), dtype=complex)
    for a in range(m):
        weight = 1.0 + 0.0j
        for c in range(m):
            if c != a:
                weight *= np.sinh(y[a] - y[c] - eta) / np.sinh(y[a] - y[c])
        for xk in x:
            weight *= np.sinh(y[a] - xk) / np.sinh(y[a] - xk - eta)
        q[a, :] = g * np.sinh(eta) / np.sinh(y - y[a] + eta) * weight
    return q


def w_matrix(params: IdentityParams) -> np.ndarray:
    """Diagonal coupling of each x_i to the whole y family."""
    diag = np.ones(params.N, dtype=complex)
    for i, xi in enumerate(params.x):
        for ya in params.y:
            diag[i] *= np.sinh(ya - xi) / np.sinh(ya - xi - params.eta)
    return np.diag(diag)


def w_tilde_matrix(params: IdentityParams) -> np.ndarray:
    """Diagonal coupling of each y_a to the whole x family."""
    diag = np.ones(params.M, dtype=complex)
    for a, ya in enumerate(params.y):
        for xk in params.x:
            diag[a] *= np.sinh(ya - xk) / np.sinh(ya - xk - params.eta)
    return np.diag(diag)


def _ladder_core(q_pts, eta, inverse_ladder):
    """(V^t)^{-1} S^{+-1} V^t on the given nodes (explicit inverse route)."""
    q_pts = np.asarray(q_pts, dtype=complex)
    k = q_pts.size
    t = np.exp(2 * q_pts)
    b = lagrange_vandermonde_inverse(t)
    vt_plain = np.vander(t, k, increasing=True).T
    powers = np.arange(1, k + 1)
    s_diag = np.exp(-(2 * powers - k - 1) * complex(eta))
    ladder = 1.0 / s_diag if inverse_ladder else s_diag
    core = (b * ladder[None, :]) @ vt_plain
    tfac = np.exp((1 - k) * q_pts)
    return core * (tfac[None, :] / tfac[:, None])


def q_factorized(params: IdentityParams) -> np.ndarray:
    """Ladder factorization g W D_eta (V^t)^{-1} S_N^{-1} V^t D_eta^{-1}."""
    x = np.asarray(params.x, dtype=complex)
    core = _ladder_core(x, params.eta, inverse_ladder=True)
    d = eta_shift_diagonal(x, params.eta)
    w = np.diag(w_matrix(params))
    return params.g * w[:, None] * d[:, None] * core / d[None, :]


def q_tilde_factorized(params: IdentityParams) -> np.ndarray:
    """Ladder factorization g W~ D_0^{-1} V S_M V^{-1} D_0 on the y family."""
    y = np.asarray(params.y, dtype=complex)
    m = y.size
    v = vandermonde_sym(y)
    s = s_matrix(m, params.eta)
    core = v @ s @ np.linalg.inv(v)
    d0 = eta_shift_diagonal(y, 0.0)
    wt = np.diag(w_tilde_matrix(params))
    return params.g * wt[:, None] * core * (d0[None, :] / d0[:, None])


def q_matrix(params: IdentityParams, check: bool = True) -> np.ndarray:
    """The N x N matrix of the identity; cross-checked against its
    ladder factorization when ``check`` is set."""
    q = _q_entrywise(params.x, params.y, params.g, params.eta)
    if check:
        err = rel_diff(q, q_factorized(params))
        if err > 1e-9:
            raise ArithmeticError(f"ladder factorization disagrees: rel err {err:.3e}")
    return q


def q_tilde_matrix(params: IdentityParams, check: bool = True) -> np.ndarray:
    """The M x M partner matrix; cross-checked against its factorization."""
    if params.M < 1:
        return np.zeros((0, 0), dtype=complex)
    q = _q_tilde_entrywise(params.y, params.x, params.g, params.eta)
    if check:
        err = rel_diff(q, q_tilde_factorized(params))
        if err > 1e-9:
            raise ArithmeticError(f"ladder factorization disagrees: rel err {err:.3e}")
    return q


def vandermonde_inverse(x) -> np.ndarray:
    """Explicit inverse-transpose of the Vandermonde in t_i = e^{2 x_i}.

    Row k holds the ascending coefficients of the Lagrange polynomial
    through the t nodes, so the product with V^t is the identity.
    """
    x = np.asarray(x, dtype=complex)
    _require_distinct_nodes(x, "e^(2x)")
    return lagrange_vandermonde_inverse(np.exp(2 * x))


def ladder_char_poly(K: int, g, eta) -> np.ndarray:
    """Coefficients of det(lambda I - g S_K); exact product of linear factors."""
    if K == 0:
        return np.array([1.0 + 0.0j])
    return np.poly(complex(g) * np.diag(s_matrix(K, eta)))


def verify_determinant_splitting(params: IdentityParams) -> float:
    """Coefficient-wise residual of the determinant identity
    det(lambda I - Q) = det(lambda I - g S_{N-M}) det(lambda I - Q~)."""
    q = q_matrix(params)
    lhs = charpoly_minors(q)
    rhs = ladder_char_poly(params.N - params.M, params.g, params.eta)
    if params.M:
        rhs = np.polymul(rhs, charpoly_minors(q_tilde_matrix(params)))
    return poly_rel_residual(lhs, rhs)


def normalized_identity_sides(params: IdentityParams) -> tuple[np.ndarray, np.ndarray]:
    """Both sides of the identity in the W-normalized form
    det(lambda W^{-1} - Q_0) = det(lambda I - g S_{N-M}) det(lambda W~^{-1} - Q~_0),
    as coefficient vectors in lambda.

    The individual matrix entries develop poles as two x points
    coalesce, but these coefficient vectors stay bounded; they are also
    the natural objects for the large-y stabilization checks.
    """
    w = np.diag(w_matrix(params))
    q0 = _q_entrywise(params.x, (), params.g, params.eta)
    lhs = charpoly_minors(np.diag(w) @ q0) / np.prod(w)
    rhs = ladder_char_poly(params.N - params.M, params.g, params.eta)
    if params.M:
        wt = np.diag(w_tilde_matrix(params))
        qt0 = _q_tilde_entrywise(params.y, (), params.g, params.eta)
        rhs = np.polymul(rhs, charpoly_minors(np.diag(wt) @ qt0) / np.prod(wt))
    return lhs, rhs


def verify_solved_chain_splitting(chain: ChainParams, roots: BetheRootSet) -> float:
    """Characteristic-polynomial residual of the spectral correspondence
    for one solved sector.

    Builds the Lax matrix from the closed-form charge values of the
    root set and compares its characteristic polynomial against the
    product of the two ladder polynomials centred at e^{+-Lh}.
    """
    defect = bae_defect(roots, chain)
    if defect.size and np.max(np.abs(defect)) > 1e-10:
        raise InvalidBetheRoots(
            f"equation defect {np.max(np.abs(defect)):.3e} exceeds 1e-10"
        )
    h_vals = all_eigenvalues_h(roots, chain)
    lax = lax_from_velocities(np.asarray(chain.inhom), -h_vals, chain.eta).entries
    # Same matrix, assembled through the x - eta / root family weights.
    q = _q_entrywise(
        np.asarray(chain.inhom) - chain.eta,
        roots.roots,
        np.exp(chain.L * chain.h),
        chain.eta,
    )
    if rel_diff(lax, q) > 1e-9:
        raise ArithmeticError("Lax build and weight-family build disagree")
    m2 = roots.M2
    m1 = chain.L - m2
    lhs = charpoly_minors(lax)
    rhs = np.polymul(
        ladder_char_poly(m1, np.exp(chain.L * chain.h), chain.eta),
        ladder_char_poly(m2, np.exp(-chain.L * chain.h), chain.eta),
    )
    return poly_rel_residual(lhs, rhs)
