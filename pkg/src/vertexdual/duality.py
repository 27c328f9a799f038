"""The correspondence engine: predicted ladder spectra, per-eigenstate
verification that the classical Lax matrix built from quantum charge
values carries those spectra, momentum extraction from the companion
charges, and the inverse problem of recovering charge tuples from the
prescribed spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MatchFailed, ZeroGValue
from .linalg import match_multisets
from .ruijsenaars import LaxMatrix, lax_from_velocities, symmetric_invariants
from .spin_chain import ChainParams, JointSpectrum, joint_diagonalize

_HARD_MATCH_LIMIT = 1e-4


@dataclass(frozen=True)
class StringSpectrum:
    """The two geometric ladders of Lax eigenvalues for one sector."""

    values: np.ndarray
    M1: int
    M2: int
    h: complex
    eta: complex


@dataclass(frozen=True)
class DualityRecord:
    sector_M2: int
    H_values: np.ndarray
    lax_eigenvalues: np.ndarray
    matched_string: StringSpectrum
    max_match_error: float


@dataclass(frozen=True)
class DualityReport:
    records: list[DualityRecord]
    worst_error: float
    n_states: int
    params_hash: str

    @property
    def passed(self) -> bool:
        return self.worst_error <= 1e-8


def predicted_strings(L: int, M2: int, h, eta) -> StringSpectrum:
    """Eigenvalue ladders e^{+-Lh - (M - 1) eta + 2 eta j} for the sector."""
    if not 0 <= M2 <= L:
        raise ValueError(f"M2 must lie in [0, {L}], got {M2}")
    h, eta = complex(h), complex(eta)
    m1 = L - M2
    up = [np.exp(L * h - (m1 - 1) * eta + 2 * eta * j) for j in range(m1)]
    down = [np.exp(-L * h - (M2 - 1) * eta + 2 * eta * j) for j in range(M2)]
    values = np.array(up + down, dtype=complex)
    order = np.lexsort((values.imag, values.real))
    return StringSpectrum(values=values[order], M1=m1, M2=M2, h=h, eta=eta)


def predicted_integrals(L: int, M2: int, h, eta, n: int) -> complex:
    """Closed form of the n-th power sum over the predicted ladders."""
    if n < 1:
        raise ValueError("power index must be >= 1")
    h, eta = complex(h), complex(eta)
    m1 = L - M2
    s = np.sinh(eta * n)
    return complex(
        np.exp(L * h * n) * np.sinh(m1 * eta * n) / s
        + np.exp(-L * h * n) * np.sinh(M2 * eta * n) / s
    )


def lax_from_chain_state(chain: ChainParams, H) -> LaxMatrix:
    """Lax matrix at coordinates x_i with velocities -H_i; diagonal is H."""
    return lax_from_velocities(np.asarray(chain.inhom), -np.asarray(H, dtype=complex), chain.eta)


def verify_duality(chain: ChainParams, seed: int = 0) -> DualityReport:
    """Check every joint eigenstate against its predicted ladder spectrum.

    For each state the Lax matrix is built from the measured charge
    values, its eigenvalues are matched onto the sector's ladders by
    minimal-cost assignment, and the worst relative error is recorded.
    """
    spectrum = joint_diagonalize(chain, seed=seed)
    records = []
    worst = 0.0
    for state in spectrum.states:
        lax = lax_from_chain_state(chain, state.H)
        eigs = np.linalg.eigvals(lax.entries)
        target = predicted_strings(chain.L, state.sector_M2, chain.h, chain.eta)
        _, errors = match_multisets(eigs, target.values)
        err = float(errors.max())
        if err > _HARD_MATCH_LIMIT:
            raise MatchFailed(
                f"sector M2={state.sector_M2}: assignment error {err:.3e} "
                f"exceeds {_HARD_MATCH_LIMIT:g}"
            )
        order = np.lexsort((eigs.imag, eigs.real))
        records.append(
            DualityRecord(
                sector_M2=state.sector_M2,
                H_values=state.H,
                lax_eigenvalues=eigs[order],
                matched_string=target,
                max_match_error=err,
            )
        )
        worst = max(worst, err)
    return DualityReport(
        records=records,
        worst_error=worst,
        n_states=len(records),
        params_hash=spectrum.params_hash,
    )


def verify_momentum_identification(chain: ChainParams, spectrum: JointSpectrum) -> float:
    """Extract momenta from the companion charges and test the velocity law.

    For each state, p_i = -log(-eta G_i)/eta on the principal branch;
    the residual is the worst relative defect of
    -H_i = eta e^{eta p_i} prod_{k != i} sinh(x_i - x_k + eta)/sinh(x_i - x_k).
    """
    xs = np.asarray(chain.inhom)
    eta = chain.eta
    weights = np.empty(chain.L, dtype=complex)
    for i in range(chain.L):
        mask = np.arange(chain.L) != i
        weights[i] = np.prod(np.sinh(xs[i] - xs[mask] + eta) / np.sinh(xs[i] - xs[mask]))
    worst = 0.0
    for state in spectrum.states:
        if np.any(np.abs(state.G) < 1e-100):
            raise ZeroGValue("a companion-charge value vanished")
        p = -np.log(-eta * state.G) / eta
        lhs = -state.H
        rhs = eta * np.exp(eta * p) * weights
        resid = np.max(np.abs(lhs - rhs) / np.maximum(np.abs(state.H), 1e-12))
        worst = max(worst, float(resid))
    return worst


@dataclass(frozen=True)
class InverseSolution:
    """One recovered charge tuple with its equation residual and, when
    the sector was cross-diagonalized, its best eigenstate match."""

    H: np.ndarray
    residual: float
    matched_state: int | None = None
    match_error: float | None = None


def _string_elementary(L: int, M2: int, h, eta) -> np.ndarray:
    poly = np.poly(predicted_strings(L, M2, h, eta).values)
    return np.array([(-1.0) ** n * poly[n] for n in range(1, L + 1)])


def _inverse_residual(x, H, eta, targets) -> float:
    vals = symmetric_invariants(x, H, eta)
    return float(np.max(np.abs(vals - targets) / np.maximum(np.abs(targets), 1.0)))


def _inverse_newton(x, H0, eta, targets, max_iter=60):
    n = x.size
    H = H0.astype(complex).copy()
    for _ in range(max_iter):
        f = symmetric_invariants(x, H, eta) - targets
        if np.max(np.abs(f) / np.maximum(np.abs(targets), 1.0)) < 1e-13:
            return H
        jac = np.empty((n, n), dtype=complex)
        for j in range(n):
            h_one = H.copy()
            h_one[j] = 1.0
            h_zero = H.copy()
            h_zero[j] = 0.0
            # The invariants are multilinear in H, so the j-th partial is
            # the difference of the H_j = 1 and H_j = 0 evaluations.
            jac[:, j] = symmetric_invariants(x, h_one, eta) - symmetric_invariants(
                x, h_zero, eta
            )
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        H = H - step
    return H if _inverse_residual(x, H, eta, targets) < 1e-10 else None


def inverse_spectral_solve(
    chain_x,
    eta,
    h,
    M2: int,
    seed: int = 0,
    n_starts: int = 40,
    mode: str = "both",
    residual_tol: float = 1e-9,
) -> list[InverseSolution]:
    """Solve the inverse problem: charge tuples whose Lax invariants equal
    the elementary symmetric functions of the predicted ladder values.

    Newton in C^L with the analytic (multilinearity) Jacobian.  Start
    modes:

    * ``"validation"`` - eigenstate charge vectors from an exact
      diagonalization of the sector, perturbed by 1e-2 relative noise.
      Available for L <= 4.
    * ``"discovery"`` - ``n_starts`` seeded random complex tuples.  Note
      that the algebraic system has solutions beyond the eigenstate
      tuples (assignment permutations), so discovery-mode output need
      not match an eigenstate.
    * ``"both"`` - union of the two start sets.

    When L <= 4, each returned solution is annotated with its closest
    eigenstate tuple and the corresponding relative error.
    """
    x = np.asarray(chain_x, dtype=complex)
    eta, h = complex(eta), complex(h)
    L = x.size
    if mode not in ("validation", "discovery", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    targets = _string_elementary(L, M2, h, eta)
    rng = np.random.default_rng(seed)
    ed_vectors: list[np.ndarray] = []
    if L <= 4:
        chain = ChainParams(L=L, eta=eta, h=h, inhom=tuple(x))
        spec = joint_diagonalize(chain, seed=seed)
        ed_vectors = [s.H for s in spec.states if s.sector_M2 == M2]
    starts: list[np.ndarray] = []
    if mode in ("validation", "both"):
        if not ed_vectors:
            raise ValueError("validation starts need L <= 4")
        for vec in ed_vectors:
            noise = rng.standard_normal(L) + 1j * rng.standard_normal(L)
            starts.append(vec * (1.0 + 1e-2 * noise / np.abs(noise)))
    if mode in ("discovery", "both"):
        scale = np.mean(np.abs(predicted_strings(L, M2, h, eta).values))
        for _ in range(n_starts):
            starts.append(scale * (rng.standard_normal(L) + 1j * rng.standard_normal(L)))
    solutions: list[InverseSolution] = []
    for H0 in starts:
        H = _inverse_newton(x, H0, eta, targets)
        if H is None:
            continue
        residual = _inverse_residual(x, H, eta, targets)
        if residual > residual_tol:
            continue
        scale = max(np.max(np.abs(H)), 1.0)
        if any(np.max(np.abs(H - s.H)) < 1e-7 * scale for s in solutions):
            continue
        matched, match_err = None, None
        if ed_vectors:
            errs = [
                float(np.max(np.abs(H - vec) / np.maximum(np.abs(vec), 1e-12)))
                for vec in ed_vectors
            ]
            matched = int(np.argmin(errs))
            match_err = errs[matched]
        solutions.append(
            InverseSolution(H=H, residual=residual, matched_state=matched, match_error=match_err)
        )
    solutions.sort(key=lambda s: tuple(val for z in s.H for val in (z.real, z.imag)))
    return solutions
