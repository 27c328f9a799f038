"""Classical trigonometric Ruijsenaars-Schneider system: Hamiltonian,
flow, Lax matrix in its several equivalent builds, spectral invariants,
and adaptive time evolution with isospectrality monitoring.

The Hamilton equations are integrated in (x, p); the second-order form
of the equations of motion is only used as a residual check.  States
and all derived matrices are complex; real initial data simply embeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    CollisionDetected,
    GeneralPositionViolated,
    SingularVandermonde,
    StepSizeUnderflow,
)
from .linalg import coth, lagrange_vandermonde_inverse

_GP_TOL = 1e-9
_EXIST_TOL = 1e-12


def _check_coordinates_distinct(x, tol=_GP_TOL):
    """Guard for the flow itself, singular only at x_i = x_j mod i*pi."""
    x = np.asarray(x, dtype=complex)
    for i in range(x.size):
        for j in range(i + 1, x.size):
            if abs(np.sinh(x[i] - x[j])) <= tol:
                raise GeneralPositionViolated(f"|sinh(x_{i + 1} - x_{j + 1})| <= {tol:g}")


def _check_general_position(x, eta, tol=_GP_TOL):
    """Full guard for Lax-type builds, which are also singular on +-eta shifts."""
    x = np.asarray(x, dtype=complex)
    for i in range(x.size):
        for j in range(i + 1, x.size):
            d = x[i] - x[j]
            for shift, label in ((0.0, ""), (eta, " + eta"), (-eta, " - eta")):
                if abs(np.sinh(d + shift)) <= tol:
                    raise GeneralPositionViolated(
                        f"|sinh(x_{i + 1} - x_{j + 1}{label})| <= {tol:g}"
                    )


@dataclass(frozen=True)
class RSState:
    """Phase-space point: coupling eta, coordinates x, momenta p."""

    eta: complex
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eta", complex(self.eta))
        object.__setattr__(self, "x", np.asarray(self.x, dtype=complex))
        object.__setattr__(self, "p", np.asarray(self.p, dtype=complex))
        if self.x.shape != self.p.shape:
            raise ValueError("x and p must have the same length")
        _check_coordinates_distinct(self.x, tol=_EXIST_TOL)

    @property
    def L(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class LaxMatrix:
    entries: np.ndarray

    @property
    def L(self) -> int:
        return self.entries.shape[0]


def _interaction(x, eta, i):
    """prod_{k != i} sinh(x_i - x_k + eta)/sinh(x_i - x_k)."""
    if x.size == 1:
        return 1.0 + 0.0j
    mask = np.arange(x.size) != i
    return np.prod(np.sinh(x[i] - x[mask] + eta) / np.sinh(x[i] - x[mask]))


def rs_hamiltonian(state: RSState) -> complex:
    """sum_i e^{eta p_i} prod_{k != i} sinh(x_i - x_k + eta)/sinh(x_i - x_k)."""
    x, p, eta = state.x, state.p, state.eta
    _check_coordinates_distinct(x)
    return complex(sum(np.exp(eta * p[i]) * _interaction(x, eta, i) for i in range(x.size)))


def velocities(state: RSState) -> np.ndarray:
    """dx_i/dt = eta e^{eta p_i} prod_{k != i} sinh(x_i - x_k + eta)/sinh(x_i - x_k)."""
    x, p, eta = state.x, state.p, state.eta
    _check_coordinates_distinct(x)
    return np.array([eta * np.exp(eta * p[i]) * _interaction(x, eta, i) for i in range(x.size)])


def _interaction_omitting(x, eta, i, skip):
    """prod over l not in {i, skip} of sinh(x_i - x_l + eta)/sinh(x_i - x_l)."""
    out = 1.0 + 0.0j
    for l in range(x.size):
        if l != i and l != skip:
            out *= np.sinh(x[i] - x[l] + eta) / np.sinh(x[i] - x[l])
    return out


def hamilton_rhs(state: RSState) -> tuple[np.ndarray, np.ndarray]:
    """Analytic right-hand sides (dx/dt, dp/dt) of the canonical flow.

    Written so the only denominators are sinh(x_i - x_k): the flow (but
    not the Lax matrix) is regular where a gap crosses +-eta, and the
    naive W_i * coth(x_i - x_k + eta) grouping loses all precision
    there, stalling the adaptive integrator.
    """
    x, p, eta = state.x, state.p, state.eta
    n = x.size
    xd = velocities(state)
    pd = np.zeros(n, dtype=complex)
    full = [_interaction(x, eta, i) for i in range(n)]
    boost = np.exp(eta * p)
    for i in range(n):
        s = 0.0 + 0.0j
        for k in range(n):
            if k == i:
                continue
            s += boost[i] * (
                _interaction_omitting(x, eta, i, k) * np.cosh(x[i] - x[k] + eta)
                - full[i] * np.cosh(x[i] - x[k])
            ) / np.sinh(x[i] - x[k])
        for m in range(n):
            if m == i:
                continue
            s += boost[m] * (
                full[m] * np.cosh(x[m] - x[i])
                - _interaction_omitting(x, eta, m, i) * np.cosh(x[m] - x[i] + eta)
            ) / np.sinh(x[m] - x[i])
        pd[i] = -s
    return xd, pd


def acceleration(x, xdot, eta) -> np.ndarray:
    """Second-order form of the equations of motion, evaluated from (x, dx/dt)."""
    x = np.asarray(x, dtype=complex)
    xdot = np.asarray(xdot, dtype=complex)
    n = x.size
    out = np.zeros(n, dtype=complex)
    sh2 = np.sinh(eta) ** 2
    for j in range(n):
        for k in range(n):
            if k == j:
                continue
            d = x[j] - x[k]
            out[j] -= (
                2.0
                * xdot[j]
                * xdot[k]
                * sh2
                * np.cosh(d)
                / (np.sinh(d + eta) * np.sinh(d) * np.sinh(d - eta))
            )
    return out


def lax_from_velocities(x, xdot, eta) -> LaxMatrix:
    """L_ij = sinh(eta) xdot_i / sinh(x_i - x_j - eta); diagonal is -xdot_i."""
    x = np.asarray(x, dtype=complex)
    xdot = np.asarray(xdot, dtype=complex)
    eta = complex(eta)
    _check_general_position(x, eta)
    n = x.size
    entries = np.empty((n, n), dtype=complex)
    for i in range(n):
        entries[i, :] = np.sinh(eta) * xdot[i] / np.sinh(x[i] - x - eta)
    return LaxMatrix(entries)


def lax_from_momenta(state: RSState) -> LaxMatrix:
    """Lax matrix written directly in momenta; equals the velocity build."""
    return lax_from_velocities(state.x, velocities(state), state.eta)


def a_matrix(x, xdot, eta) -> np.ndarray:
    """Companion matrix of the Lax representation dL/dt = [A, L].

    Off-diagonal entries carry the velocity of the row particle,
    xdot_j / sinh(x_j - x_k); without that factor the representation
    fails (checked against finite-difference dL/dt).
    """
    x = np.asarray(x, dtype=complex)
    xdot = np.asarray(xdot, dtype=complex)
    eta = complex(eta)
    _check_general_position(x, eta)
    n = x.size
    a = np.empty((n, n), dtype=complex)
    for j in range(n):
        diag = 0.0 + 0.0j
        for l in range(n):
            if l != j:
                diag += xdot[l] * coth(x[j] - x[l])
            diag -= xdot[l] * coth(x[j] - x[l] + eta)
        a[j, j] = diag
        for k in range(n):
            if k != j:
                a[j, k] = xdot[j] / np.sinh(x[j] - x[k])
    return a


def cauchy_factor(d, eta):
    """sinh^2(d) / (sinh(d + eta) sinh(d - eta)); symmetric in d -> -d."""
    return np.sinh(d) ** 2 / (np.sinh(d + eta) * np.sinh(d - eta))


def cauchy_det(x, eta, subset=None) -> complex:
    """Determinant of [sinh(eta)/sinh(x_i - x_j - eta)] on a coordinate subset.

    Computes both the LU determinant and the closed product form
    (-1)^n prod_{i<j} cauchy_factor(x_i - x_j), asserts they agree to
    1e-10 relative, and returns the closed form.
    """
    x = np.asarray(x, dtype=complex)
    if subset is not None:
        x = x[np.asarray(subset, dtype=int)]
    eta = complex(eta)
    _check_general_position(x, eta)
    n = x.size
    matrix = np.empty((n, n), dtype=complex)
    for i in range(n):
        matrix[i, :] = np.sinh(eta) / np.sinh(x[i] - x - eta)
    direct = complex(np.linalg.det(matrix))
    closed = complex((-1.0) ** n)
    for i in range(n):
        for j in range(i + 1, n):
            closed *= cauchy_factor(x[i] - x[j], eta)
    if abs(direct - closed) > 1e-10 * max(abs(direct), abs(closed), 1e-300):
        raise ArithmeticError(
            f"closed-form determinant disagrees with LU: {closed} vs {direct}"
        )
    return closed


def symmetric_invariants(x, weights, eta) -> np.ndarray:
    """The n-th entry is sum over n-subsets S of prod_{i in S} w_i times
    prod of cauchy_factor over pairs in S.  Multilinear in the weights."""
    x = np.asarray(x, dtype=complex)
    weights = np.asarray(weights, dtype=complex)
    n = x.size
    pair = {}
    for i in range(n):
        for j in range(i + 1, n):
            pair[(i, j)] = cauchy_factor(x[i] - x[j], eta)
    out = np.zeros(n, dtype=complex)
    for size in range(1, n + 1):
        total = 0.0 + 0.0j
        for sub in combinations(range(n), size):
            term = np.prod(weights[list(sub)])
            for a in range(size):
                for b in range(a + 1, size):
                    term *= pair[(sub[a], sub[b])]
            total += term
        out[size - 1] = total
    return out


def char_poly_via_en(x, xdot, eta) -> np.ndarray:
    """Coefficients (highest power first) of det(lambda I - L) assembled
    from the subset-sum invariants rather than from the matrix."""
    x = np.asarray(x, dtype=complex)
    en = symmetric_invariants(x, -np.asarray(xdot, dtype=complex), eta)
    coeffs = np.empty(x.size + 1, dtype=complex)
    coeffs[0] = 1.0
    for n in range(1, x.size + 1):
        coeffs[n] = (-1.0) ** n * en[n - 1]
    return coeffs


def power_traces(lax: np.ndarray, n_max: int) -> np.ndarray:
    """tr L^n for n = 1..n_max."""
    out = np.empty(n_max, dtype=complex)
    acc = np.eye(lax.shape[0], dtype=complex)
    for n in range(n_max):
        acc = acc @ lax
        out[n] = np.trace(acc)
    return out


def s_matrix(K: int, eta) -> np.ndarray:
    """Diagonal ladder diag(e^{-(2i - K - 1) eta}), i = 1..K; empty for K=0."""
    if K < 0:
        raise ValueError("K must be non-negative")
    eta = complex(eta)
    return np.diag([np.exp(-(2 * (i + 1) - K - 1) * eta) for i in range(K)]) if K else np.zeros(
        (0, 0), dtype=complex
    )


def vandermonde_sym(q) -> np.ndarray:
    """V_ij = e^{(2j - K - 1) q_i}, the symmetric-exponent Vandermonde."""
    q = np.asarray(q, dtype=complex)
    k = q.size
    j = np.arange(1, k + 1)
    return np.exp(np.outer(q, 2 * j - k - 1))


def eta_shift_diagonal(q, xi) -> np.ndarray:
    """Diagonal of prod_{k != i} sinh(q_i - q_k + xi)."""
    q = np.asarray(q, dtype=complex)
    k = q.size
    diag = np.ones(k, dtype=complex)
    for i in range(k):
        for m in range(k):
            if m != i:
                diag[i] *= np.sinh(q[i] - q[m] + xi)
    return diag


def _sandwiched_ladder(q, eta, inverse_ladder=True) -> np.ndarray:
    """(V^t)^{-1} S^{+-1} V^t on nodes q, via the explicit Lagrange inverse.

    V factors as diag(e^{(1-K)q_i}) times the plain Vandermonde in
    t_i = e^{2 q_i}, so the explicit inverse of the latter gives a
    well-conditioned (V^t)^{-1}.
    """
    q = np.asarray(q, dtype=complex)
    k = q.size
    t = np.exp(2 * q)
    tmax = np.max(np.abs(t))
    for i in range(k):
        for j in range(i + 1, k):
            if abs(t[i] - t[j]) <= 1e-12 * tmax:
                raise SingularVandermonde(f"nodes e^(2x) {i} and {j} coincide")
    b = lagrange_vandermonde_inverse(t)
    vt_plain = np.vander(t, k, increasing=True).T
    powers = np.arange(1, k + 1)
    s_diag = np.exp(-(2 * powers - k - 1) * complex(eta))
    ladder = 1.0 / s_diag if inverse_ladder else s_diag
    core = (b * ladder[None, :]) @ vt_plain
    tfac = np.exp((1 - k) * q)
    return core * (tfac[None, :] / tfac[:, None])


def factorized_lax(state: RSState) -> LaxMatrix:
    """Lax matrix through the ladder factorization
    -eta e^{eta P} D_eta (V^t)^{-1} S^{-1} V^t D_eta^{-1}."""
    x, p, eta = state.x, state.p, state.eta
    _check_general_position(x, eta)
    core = _sandwiched_ladder(x, eta, inverse_ladder=True)
    d = eta_shift_diagonal(x, eta)
    entries = -eta * np.exp(eta * p)[:, None] * d[:, None] * core / d[None, :]
    return LaxMatrix(entries)


def xle_relation_check(state: RSState) -> float:
    """Residual of the conjugation identity
    e^{-eta} e^X L e^{-X} - e^{eta} e^{-X} L e^X = 2 sinh(eta) Xdot E,
    relative to ||L||, with E the all-ones matrix."""
    x, eta = state.x, state.eta
    lax = lax_from_momenta(state).entries
    xd = velocities(state)
    ex = np.exp(x)
    lhs = np.exp(-eta) * (ex[:, None] * lax / ex[None, :]) - np.exp(eta) * (
        lax * ex[None, :] / ex[:, None]
    )
    rhs = 2 * np.sinh(eta) * np.outer(xd, np.ones(x.size))
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(lax))


def _pack(x, p):
    return np.concatenate([x.real, x.imag, p.real, p.imag])


def _unpack(y, n):
    x = y[0:n] + 1j * y[n : 2 * n]
    p = y[2 * n : 3 * n] + 1j * y[3 * n :]
    return x, p


def evolve(
    state: RSState,
    t_final: float,
    tol_ode: float = 1e-10,
    n_samples: int = 33,
    collision_tol: float = 1e-6,
) -> list[tuple[float, RSState]]:
    """Adaptive high-order Runge-Kutta integration of the canonical flow.

    Returns (t, state) samples on a uniform grid including both ends.
    Raises CollisionDetected when any |sinh(x_i - x_j)| crosses
    ``collision_tol`` and StepSizeUnderflow when the integrator stalls.
    """
    n = state.L
    eta = state.eta

    def rhs(_t, y):
        x, p = _unpack(y, n)
        st = RSState(eta=eta, x=x, p=p)
        xd, pd = hamilton_rhs(st)
        return _pack(xd, pd)

    def collision(_t, y):
        x, _ = _unpack(y, n)
        gaps = [abs(np.sinh(x[i] - x[j])) for i in range(n) for j in range(i + 1, n)]
        return (min(gaps) if gaps else 1.0) - collision_tol

    collision.terminal = True
    collision.direction = -1.0

    # The event detector only sees sign crossings, so reject states that
    # start inside the collision shell.
    if collision(0.0, _pack(state.x, state.p)) <= 0.0:
        raise CollisionDetected("initial coordinates already within the collision threshold")

    sol = solve_ivp(
        rhs,
        (0.0, float(t_final)),
        _pack(state.x, state.p),
        method="DOP853",
        rtol=tol_ode,
        atol=tol_ode,
        t_eval=np.linspace(0.0, float(t_final), n_samples),
        events=collision,
        dense_output=False,
    )
    if sol.status == 1:
        t_ev = sol.t_events[0][0]
        raise CollisionDetected(f"particles collide near t = {t_ev:.6g}")
    if sol.status < 0:
        raise StepSizeUnderflow(sol.message)
    out = []
    for idx, t in enumerate(sol.t):
        x, p = _unpack(sol.y[:, idx], n)
        out.append((float(t), RSState(eta=eta, x=x, p=p)))
    return out


def flow_step(state: RSState, dt: float, n_sub: int = 8) -> RSState:
    """Fixed-step classical RK4 advance; used for local finite differences."""
    x, p = state.x.copy(), state.p.copy()
    eta = state.eta
    h = dt / n_sub

    def f(xx, pp):
        return hamilton_rhs(RSState(eta=eta, x=xx, p=pp))

    for _ in range(n_sub):
        k1 = f(x, p)
        k2 = f(x + h / 2 * k1[0], p + h / 2 * k1[1])
        k3 = f(x + h / 2 * k2[0], p + h / 2 * k2[1])
        k4 = f(x + h * k3[0], p + h * k3[1])
        x = x + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        p = p + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    return RSState(eta=eta, x=x, p=p)
