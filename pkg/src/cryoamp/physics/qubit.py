"""Stationary spectrum of an rf-SQUID flux qubit on a flux grid.

Internally flux is measured in flux quanta (phi = Phi / Phi0) and energy in
E_L = Phi0**2 / (2 L). In these units the Hamiltonian reads

    H = -kappa d^2/dphi^2 + (phi - phi_e)^2 - beta_L / (2 pi^2) cos(2 pi phi),
    kappa = hbar^2 L / (C Phi0^4),

discretised with the three-point second difference and Dirichlet ends.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eigh_tridiagonal

from cryoamp.constants import H, HBAR, K_B, PHI0


@dataclass(frozen=True)
class QubitParams:
    l: float  # H, loop inductance
    c: float  # F, junction capacitance
    beta_l: float  # 2 pi I_c L / Phi0
    phi_e: float  # external flux, Phi0 units

    def __post_init__(self):
        if not (self.l > 0 and self.c > 0):
            raise ValueError("l and c must be positive")
        if self.beta_l < 0:
            raise ValueError("beta_l must be non-negative")

    @property
    def i_c(self) -> float:
        """Junction critical current, A."""
        return self.beta_l * PHI0 / (2 * math.pi * self.l)

    @property
    def e_l(self) -> float:
        """Inductive energy unit Phi0^2 / 2L, J."""
        return PHI0**2 / (2 * self.l)

    @property
    def kappa(self) -> float:
        return HBAR**2 * self.l / (self.c * PHI0**4)

    @property
    def lc_frequency(self) -> float:
        """Bare LC frequency 1 / (2 pi sqrt(LC)), Hz."""
        return 1.0 / (2 * math.pi * math.sqrt(self.l * self.c))


DOUBLE_WELL_QUBIT = QubitParams(l=2e-10, c=76e-15, beta_l=1.325, phi_e=0.5135)


@dataclass(frozen=True)
class Grid:
    phi_min: float
    phi_max: float
    n: int = 2048

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("grid needs at least 3 points")
        if not self.phi_min < self.phi_max:
            raise ValueError("phi_min must be below phi_max")

    @classmethod
    def around(cls, q: QubitParams, half_width: float = 1.2, n: int = 2048) -> "Grid":
        return cls(q.phi_e - half_width, q.phi_e + half_width, n)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.phi_min, self.phi_max, self.n)

    @property
    def step(self) -> float:
        return (self.phi_max - self.phi_min) / (self.n - 1)


def potential(q: QubitParams, phi) -> np.ndarray:
    """U(phi) in units of E_L."""
    phi = np.asarray(phi, dtype=float)
    return (phi - q.phi_e) ** 2 - q.beta_l / (2 * math.pi**2) * np.cos(2 * math.pi * phi)


@dataclass
class Hamiltonian:
    params: QubitParams
    grid: Grid
    phi: np.ndarray
    potential: np.ndarray  # E_L units, full grid
    diag: np.ndarray  # interior points only
    offdiag: np.ndarray
    coarse: bool = False

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def build_hamiltonian(q: QubitParams, grid: Grid | None = None, *, quanta: float = 40.0) -> Hamiltonian:
    """Tridiagonal Hamiltonian on the interior of ``grid`` (E_L units).

    Sets ``coarse`` (and warns) when the step exceeds a third of the shortest
    local wavelength at ``quanta`` bare-LC quanta above the potential minimum.
    """
    grid = grid or Grid.around(q)
    phi = grid.points
    h = grid.step
    u = potential(q, phi)
    kap = q.kappa
    inner = u[1:-1]
    diag = inner + 2.0 * kap / h**2
    off = np.full(len(inner) - 1, -kap / h**2)

    e_kin = quanta * 2.0 * math.sqrt(kap)
    wavelength = 2 * math.pi / math.sqrt(e_kin / kap)
    coarse = h > wavelength / 3.0
    if coarse:
        warnings.warn(
            f"grid step {h:.3g} exceeds a third of the local wavelength {wavelength:.3g}",
            stacklevel=2,
        )
    return Hamiltonian(q, grid, phi, u, diag, off, coarse)


@dataclass
class SpectrumResult:
    params: QubitParams
    grid: np.ndarray  # phi, Phi0 units
    potential_k: np.ndarray  # U / k_B, K
    energies: np.ndarray  # J, ascending
    wavefunctions: np.ndarray  # (n_grid, k), unit trapezoidal norm, zero at both ends
    flux_expect: np.ndarray  # <phi> per level

    @property
    def energies_k(self) -> np.ndarray:
        return self.energies / K_B

    @property
    def energies_ghz(self) -> np.ndarray:
        return self.energies / H / 1e9

    def transition_ghz(self, i: int, j: int) -> float:
        return float((self.energies[j] - self.energies[i]) / H / 1e9)

    def probability(self, level: int) -> np.ndarray:
        return self.wavefunctions[:, level] ** 2

    def gram(self) -> np.ndarray:
        """Overlap matrix under the trapezoidal inner product."""
        h = self.grid[1] - self.grid[0]
        return h * self.wavefunctions.T @ self.wavefunctions


def eigensolve(ham: Hamiltonian, k: int = 12) -> SpectrumResult:
    """Lowest ``k`` eigenpairs (LAPACK bisection + inverse iteration)."""
    m = len(ham.diag)
    if not 1 <= k <= m:
        raise ValueError(f"k must be in [1, {m}]")
    w, v = eigh_tridiagonal(ham.diag, ham.offdiag, select="i", select_range=(0, k - 1))
    order = np.argsort(w)
    w, v = w[order], v[:, order]
    h = ham.grid.step
    psi = np.zeros((len(ham.phi), k))
    psi[1:-1] = v / math.sqrt(h)
    # fix the sign so the largest lobe is positive
    signs = np.sign(psi[np.argmax(np.abs(psi), axis=0), np.arange(k)])
    psi *= signs
    flux = h * (ham.phi[:, None] * psi**2).sum(axis=0)
    e_l = ham.params.e_l
    return SpectrumResult(
        params=ham.params,
        grid=ham.phi,
        potential_k=ham.potential * e_l / K_B,
        energies=w * e_l,
        wavefunctions=psi,
        flux_expect=flux,
    )


def spectrum(q: QubitParams, k: int = 12, grid: Grid | None = None) -> SpectrumResult:
    return eigensolve(build_hamiltonian(q, grid), k)


def local_minima(q: QubitParams, lo: float = 0.0, hi: float = 1.0, n: int = 20001) -> np.ndarray:
    """Positions of interior local minima of U in [lo, hi]."""
    phi = np.linspace(lo, hi, n)
    u = potential(q, phi)
    idx = np.where((u[1:-1] < u[:-2]) & (u[1:-1] < u[2:]))[0] + 1
    return phi[idx]


@dataclass(frozen=True)
class Wells:
    minima: tuple[float, float]  # (left, right) positions
    depths: tuple[float, float]  # U at the minima, E_L units
    barrier: float  # barrier-top position

    @property
    def deep(self) -> str:
        return "left" if self.depths[0] < self.depths[1] else "right"


def find_wells(q: QubitParams) -> Wells:
    """The two deepest minima in one period around phi_e and the barrier between them."""
    mins = local_minima(q, q.phi_e - 1.0, q.phi_e + 1.0)
    if len(mins) < 2:
        raise ValueError("potential is not a double well for these parameters")
    u = potential(q, mins)
    a, b = sorted(mins[np.argsort(u)[:2]])
    phi = np.linspace(a, b, 20001)
    top = float(phi[np.argmax(potential(q, phi))])
    return Wells((float(a), float(b)), (float(potential(q, a)), float(potential(q, b))), top)


def assign_wells(spec: SpectrumResult, tie: float = 0.01) -> list[str]:
    """'deep', 'shallow' or 'delocalized' for each level, from its <phi>."""
    wells = find_wells(spec.params)
    out = []
    for x in spec.flux_expect:
        if abs(x - wells.barrier) < tie:
            out.append("delocalized")
            continue
        side = "left" if x < wells.barrier else "right"
        out.append("deep" if side == wells.deep else "shallow")
    return out


def flux_jump(spec: SpectrumResult, lower: int = 6, upper: int = 7) -> float:
    """<phi>_upper - <phi>_lower for the operating level pair (0-based indices)."""
    return float(spec.flux_expect[upper] - spec.flux_expect[lower])


def transition_scan(
    q_base: QubitParams,
    vary: str,
    values,
    i: int,
    j: int,
    *,
    n: int = 2048,
    half_width: float = 1.2,
) -> list[tuple[float, float]]:
    """(value, f_ij in GHz) with parameter ``vary`` swept; grid recentred on phi_e each point."""
    if not 0 <= i < j:
        raise ValueError("need 0 <= i < j")
    if vary not in ("l", "c", "beta_l", "phi_e"):
        raise ValueError(f"unknown parameter {vary!r}")
    rows = []
    for val in values:
        q = replace(q_base, **{vary: float(val)})
        s = spectrum(q, k=j + 1, grid=Grid.around(q, half_width, n))
        rows.append((float(val), s.transition_ghz(i, j)))
    return rows
