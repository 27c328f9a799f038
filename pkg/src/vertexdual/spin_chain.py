"""Inhomogeneous 6-vertex chain: weight matrices, transfer matrices,
commuting charges, magnetization sectors and joint diagonalization.

Conventions
-----------
* Per-site basis: index 0 = up, index 1 = down.
* Site 1 occupies the leftmost tensor factor, i.e. the most significant
  bit of the computational basis index on the 2**L space.
* Everything is dense complex128.  The intended scale is L <= 10
  (dimension 1024); transfer matrices are assembled by growing the
  auxiliary-space 2x2 block monodromy one site at a time, so no
  2**(L+1)-dimensional intermediate is ever formed.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpectrum, GeneralPositionViolated, SingularSpectralPoint
from .linalg import frobenius

_SINGULAR_TOL = 1e-12

_SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
_SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class ChainParams:
    """Shared parameter record: size, anisotropy, fields, inhomogeneities.

    Validates the general-position requirements on construction: all
    pairwise gaps x_i - x_j and x_i - x_j +- eta must stay away from the
    lattice of sinh zeros, and eta itself must not sit on it.
    """

    L: int
    eta: complex
    h: complex
    v: complex = 0.0
    inhom: tuple[complex, ...] = ()
    tol_general_position: float = 1e-9

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"need at least one site, got L={self.L}")
        object.__setattr__(self, "eta", complex(self.eta))
        object.__setattr__(self, "h", complex(self.h))
        object.__setattr__(self, "v", complex(self.v))
        object.__setattr__(self, "inhom", tuple(complex(x) for x in self.inhom))
        if len(self.inhom) != self.L:
            raise ValueError(f"expected {self.L} inhomogeneities, got {len(self.inhom)}")
        tol = self.tol_general_position
        if abs(np.sinh(self.eta)) <= tol:
            raise GeneralPositionViolated(f"|sinh(eta)| = {abs(np.sinh(self.eta)):.3e} <= {tol:g}")
        for i in range(self.L):
            for j in range(i + 1, self.L):
                d = self.inhom[i] - self.inhom[j]
                for shift, label in ((0.0, ""), (self.eta, "+eta"), (-self.eta, "-eta")):
                    gap = abs(np.sinh(d + shift))
                    if gap <= tol:
                        raise GeneralPositionViolated(
                            f"|sinh(x_{i + 1} - x_{j + 1}{label})| = {gap:.3e} <= {tol:g}"
                        )

    @property
    def dim(self) -> int:
        return 2 ** self.L

    @property
    def params_hash(self) -> str:
        """Stable digest of all parameter values (used to tag results)."""
        buf = struct.pack("<q", self.L)
        for z in (self.eta, self.h, self.v, *self.inhom):
            buf += struct.pack("<dd", z.real, z.imag)
        return hashlib.sha256(buf).hexdigest()[:16]


@dataclass(frozen=True)
class QuantumOperator:
    """Dense operator on the 2**L chain space, with the site-order tag."""

    entries: np.ndarray
    site_order: str = "site1-msb"

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class SectorBasis:
    """Computational-basis indices with a fixed number of down spins."""

    L: int
    M2: int
    indices: np.ndarray


def sector_basis(L: int, M2: int) -> SectorBasis:
    idx = np.array([n for n in range(2 ** L) if bin(n).count("1") == M2], dtype=int)
    return SectorBasis(L=L, M2=M2, indices=idx)


def sector_bases(L: int) -> list[SectorBasis]:
    return [sector_basis(L, m2) for m2 in range(L + 1)]


def r_matrix(x, eta) -> np.ndarray:
    """4x4 weight matrix in the basis (uu, ud, du, dd).

    Diagonal sinh(x+eta)/sinh(x), 1, 1, sinh(x+eta)/sinh(x); the two
    spin-exchange entries are sinh(eta)/sinh(x).
    """
    x = complex(x)
    eta = complex(eta)
    sx = np.sinh(x)
    if abs(sx) <= _SINGULAR_TOL:
        raise SingularSpectralPoint(f"|sinh({x})| = {abs(sx):.3e}")
    a = np.sinh(x + eta) / sx
    c = np.sinh(eta) / sx
    return np.array(
        [
            [a, 0.0, 0.0, 0.0],
            [0.0, 1.0, c, 0.0],
            [0.0, c, 1.0, 0.0],
            [0.0, 0.0, 0.0, a],
        ],
        dtype=complex,
    )


def r_matrix_asymmetric(x, eta, h, v) -> np.ndarray:
    """Field-dressed weight matrix: r_matrix sandwiched between
    exp(h/2 sigma^z) on the first space and exp(v/2 sigma^z) on the second."""
    x, eta, h, v = complex(x), complex(eta), complex(h), complex(v)
    sx = np.sinh(x)
    if abs(sx) <= _SINGULAR_TOL:
        raise SingularSpectralPoint(f"|sinh({x})| = {abs(sx):.3e}")
    a = np.sinh(x + eta) / sx
    c = np.sinh(eta) / sx
    return np.array(
        [
            [np.exp(h + v) * a, 0.0, 0.0, 0.0],
            [0.0, np.exp(h - v), c, 0.0],
            [0.0, c, np.exp(-h + v), 0.0],
            [0.0, 0.0, 0.0, np.exp(-h - v) * a],
        ],
        dtype=complex,
    )


def _r_site_blocks(x, eta):
    """Auxiliary-space 2x2 block decomposition of r_matrix(x, eta)."""
    sx = np.sinh(x)
    if abs(sx) <= _SINGULAR_TOL:
        raise SingularSpectralPoint(f"|sinh({x})| = {abs(sx):.3e}")
    a = np.sinh(x + eta) / sx
    c = np.sinh(eta) / sx
    return (
        np.array([[a, 0.0], [0.0, 1.0]], dtype=complex),
        c * _SIGMA_MINUS,
        c * _SIGMA_PLUS,
        np.array([[1.0, 0.0], [0.0, a]], dtype=complex),
    )


def _asym_site_blocks(x, eta, h, v):
    sx = np.sinh(x)
    if abs(sx) <= _SINGULAR_TOL:
        raise SingularSpectralPoint(f"|sinh({x})| = {abs(sx):.3e}")
    a = np.sinh(x + eta) / sx
    c = np.sinh(eta) / sx
    return (
        np.array([[np.exp(h + v) * a, 0.0], [0.0, np.exp(h - v)]], dtype=complex),
        c * _SIGMA_MINUS,
        c * _SIGMA_PLUS,
        np.array([[np.exp(-h + v), 0.0], [0.0, np.exp(-h - v) * a]], dtype=complex),
    )


def _perm_site_blocks():
    """Blocks of the two-space permutation (the residue of r_matrix at 0)."""
    return (
        np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex),
        _SIGMA_MINUS.copy(),
        _SIGMA_PLUS.copy(),
        np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex),
    )


def _traced_monodromy(site_blocks, twist=None) -> np.ndarray:
    """Trace over the auxiliary space of the ordered product of site factors.

    ``site_blocks`` lists, per site (left to right), the four auxiliary
    blocks (b00, b01, b10, b11) acting on that site alone.  ``twist``
    is an optional diagonal (g_up, g_down) inserted at the right end of
    the auxiliary product.
    """
    m00, m01, m10, m11 = site_blocks[0]
    for r00, r01, r10, r11 in site_blocks[1:]:
        n00 = np.kron(m00, r00) + np.kron(m01, r10)
        n01 = np.kron(m00, r01) + np.kron(m01, r11)
        n10 = np.kron(m10, r00) + np.kron(m11, r10)
        n11 = np.kron(m10, r01) + np.kron(m11, r11)
        m00, m01, m10, m11 = n00, n01, n10, n11
    if twist is None:
        return m00 + m11
    g_up, g_down = twist
    return g_up * m00 + g_down * m11


def transfer_matrix_asym(params: ChainParams, x) -> QuantumOperator:
    """Periodic transfer matrix of the field-dressed model at parameter x."""
    x = complex(x)
    blocks = [_asym_site_blocks(x - xi, params.eta, params.h, params.v) for xi in params.inhom]
    return QuantumOperator(_traced_monodromy(blocks))


def transfer_matrix_twisted(params: ChainParams, x) -> QuantumOperator:
    """Transfer matrix of the symmetric model with twist diag(e^{Lh}, e^{-Lh})."""
    x = complex(x)
    blocks = [_r_site_blocks(x - xi, params.eta) for xi in params.inhom]
    twist = (np.exp(params.L * params.h), np.exp(-params.L * params.h))
    return QuantumOperator(_traced_monodromy(blocks, twist=twist))


def similarity_u(params: ChainParams) -> QuantumOperator:
    """Diagonal gauge exp(sum_j (j-1) h sigma^z_j) mapping the dressed model
    to the twisted one."""
    L, h = params.L, params.h
    diag = np.empty(2 ** L, dtype=complex)
    for n in range(2 ** L):
        expo = 0.0 + 0.0j
        for j in range(1, L + 1):
            s = 1.0 - 2.0 * ((n >> (L - j)) & 1)
            expo += (j - 1) * h * s
        diag[n] = np.exp(expo)
    return QuantumOperator(np.diag(diag))


def sz_m1_m2_operators(L: int) -> tuple[QuantumOperator, QuantumOperator, QuantumOperator]:
    """Total spin S^z and the up/down counters M1, M2 (diagonal, exact)."""
    m2 = np.array([bin(n).count("1") for n in range(2 ** L)], dtype=float)
    m1 = L - m2
    return (
        QuantumOperator(np.diag((m1 - m2).astype(complex))),
        QuantumOperator(np.diag(m1.astype(complex))),
        QuantumOperator(np.diag(m2.astype(complex))),
    )


def hamiltonians_h(params: ChainParams) -> list[QuantumOperator]:
    """Residue charges at the inhomogeneities.

    The k-th charge is the twisted transfer matrix with the k-th weight
    factor replaced by the permutation (the analytic residue), evaluated
    at x = x_k.  No numerical limit is taken.
    """
    L = params.L
    twist = (np.exp(L * params.h), np.exp(-L * params.h))
    out = []
    for k in range(L):
        blocks = []
        for i, xi in enumerate(params.inhom):
            if i == k:
                blocks.append(_perm_site_blocks())
            else:
                blocks.append(_r_site_blocks(params.inhom[k] - xi, params.eta))
        out.append(QuantumOperator(_traced_monodromy(blocks, twist=twist)))
    return out


def hamiltonians_g(params: ChainParams) -> list[QuantumOperator]:
    """The companion charges: twisted transfer matrix at x = x_i - eta."""
    return [transfer_matrix_twisted(params, xi - params.eta) for xi in params.inhom]


def gh_product_scalar(params: ChainParams, i: int) -> complex:
    """prod_{k != i} sinh(x_i - x_k + eta)/sinh(x_i - x_k)."""
    xs = params.inhom
    return complex(
        np.prod(
            [
                np.sinh(xs[i] - xs[k] + params.eta) / np.sinh(xs[i] - xs[k])
                for k in range(params.L)
                if k != i
            ]
        )
        if params.L > 1
        else 1.0
    )


def sector_constant(params: ChainParams, M2: int) -> complex:
    """Value of the constant term of the twisted transfer matrix on a sector."""
    L, eta, h = params.L, params.eta, params.h
    M1 = L - M2
    return complex(np.exp(L * h) * np.cosh(eta * M1) + np.exp(-L * h) * np.cosh(eta * M2))


@dataclass(frozen=True)
class EigenState:
    """One joint eigenstate: sector label, eigenvector, charge values."""

    sector_M2: int
    vector: np.ndarray
    H: np.ndarray
    G: np.ndarray
    C_value: complex
    residual_H: np.ndarray
    residual_G: np.ndarray


@dataclass(frozen=True)
class JointSpectrum:
    params_hash: str
    states: list[EigenState] = field(default_factory=list)

    @property
    def n_states(self) -> int:
        return len(self.states)


def joint_diagonalize(
    params: ChainParams,
    seed: int = 0,
    max_retries: int = 5,
    residual_tol: float = 1e-8,
) -> JointSpectrum:
    """Diagonalize all residue charges simultaneously, sector by sector.

    In each magnetization sector a random complex combination of the
    charges is diagonalized; charge values are then read off as Rayleigh
    quotients of the eigenvectors.  If any Rayleigh residual exceeds
    ``residual_tol`` the combination is redrawn, up to ``max_retries``
    times.
    """
    L = params.L
    hs = hamiltonians_h(params)
    gs = hamiltonians_g(params)
    h_norms = [frobenius(op.entries) for op in hs]
    g_norms = [frobenius(op.entries) for op in gs]
    rng = np.random.default_rng(seed)
    states: list[EigenState] = []
    for basis in sector_bases(L):
        idx = basis.indices
        h_sub = [op.entries[np.ix_(idx, idx)] for op in hs]
        g_sub = [op.entries[np.ix_(idx, idx)] for op in gs]
        c_val = sector_constant(params, basis.M2)
        for attempt in range(max_retries):
            coeff = rng.standard_normal(L) + 1j * rng.standard_normal(L)
            combo = sum(c * m for c, m in zip(coeff, h_sub))
            _, vecs = np.linalg.eig(combo)
            sector_states = []
            ok = True
            for col in range(idx.size):
                v = vecs[:, col]
                v = v / np.linalg.norm(v)
                h_vals = np.empty(L, dtype=complex)
                g_vals = np.empty(L, dtype=complex)
                res_h = np.empty(L)
                res_g = np.empty(L)
                for k in range(L):
                    w = h_sub[k] @ v
                    h_vals[k] = v.conj() @ w
                    res_h[k] = np.linalg.norm(w - h_vals[k] * v) / h_norms[k]
                    w = g_sub[k] @ v
                    g_vals[k] = v.conj() @ w
                    res_g[k] = np.linalg.norm(w - g_vals[k] * v) / g_norms[k]
                if max(res_h.max(), res_g.max()) > residual_tol:
                    ok = False
                    break
                full = np.zeros(2 ** L, dtype=complex)
                full[idx] = v
                sector_states.append(
                    EigenState(
                        sector_M2=basis.M2,
                        vector=full,
                        H=h_vals,
                        G=g_vals,
                        C_value=c_val,
                        residual_H=res_h,
                        residual_G=res_g,
                    )
                )
            if ok:
                break
        else:
            raise DegenerateSpectrum(
                f"sector M2={basis.M2}: Rayleigh residuals above {residual_tol:g} "
                f"after {max_retries} redraws"
            )
        sector_states.sort(key=lambda s: tuple(val for z in s.H for val in (z.real, z.imag)))
        states.extend(sector_states)
    return JointSpectrum(params_hash=params.params_hash, states=states)
