"""Single-disk resonances of a dielectric cylinder between parallel
conducting plates.

The plates quantize the vertical wavenumber to k_z = p*pi/l, which turns the
disk into a section of dielectric rod waveguide: interior radial fields are
J_m(k_rho * rho), exterior fields are evanescent K_m(kappa_r * rho). Matching
tangential fields at the cylinder wall gives the dispersion relation whose
roots in frequency are the (m, n, p) modes. All residuals are written in
pole-free determinant form so root bracketing never sees spurious sign flips
from Bessel zeros.

Units: lengths in mm, frequencies in GHz; c = 299 792 458 m/s exactly.
"""

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, NoSuchModeError
from .numerics import bessel_j, bessel_j_prime, bessel_k, bessel_k_prime, brent_root

C_MM_GHZ = 299.792458  # speed of light in mm * GHz

SCAN_POINTS = 2001
SCAN_F_MIN_GHZ = 0.05


class ModeFamily(Enum):
    TM = "TM"
    TE = "TE"
    HEM = "HEM"


@dataclass(frozen=True)
class ResonatorGeometry:
    """Disk diameter and permittivity plus the conducting-plate gap (mm)."""

    diameter_D: float
    plate_gap_l: float
    eps_r: float

    def __post_init__(self):
        if self.diameter_D <= 0:
            raise DomainError("diameter_D must be positive")
        if self.plate_gap_l <= 0:
            raise DomainError("plate_gap_l must be positive")
        if self.eps_r <= 1:
            raise DomainError("eps_r must exceed 1 (exterior permittivity is 1)")

    @property
    def radius(self):
        return 0.5 * self.diameter_D


@dataclass(frozen=True)
class ModeIndex:
    """Mode family plus azimuthal/radial/vertical quantum numbers (m, n, p)."""

    family: ModeFamily
    m: int
    n: int
    p: int

    def __post_init__(self):
        if self.family in (ModeFamily.TM, ModeFamily.TE) and self.m != 0:
            raise DomainError("TM/TE modes require m = 0; use HEM for m >= 1")
        if self.family is ModeFamily.HEM and self.m < 1:
            raise DomainError("hybrid HEM modes require m >= 1")
        if self.n < 1:
            raise DomainError("radial index n must be >= 1")
        if self.p < 1:
            raise DomainError("vertical index p must be >= 1")


@dataclass(frozen=True)
class ResonanceLine:
    """A resonance (f, gamma) with Q = f/gamma."""

    frequency_f: float
    width_gamma: float
    q_factor: float

    @classmethod
    def from_frequency_width(cls, frequency_f, width_gamma):
        if width_gamma < 0:
            raise DomainError("width_gamma must be nonnegative")
        q = frequency_f / width_gamma if width_gamma > 0 else math.inf
        return cls(frequency_f, width_gamma, q)


def kz(geometry, p):
    """Plate-quantized vertical wavenumber p*pi/l in 1/mm."""
    if p < 1:
        raise DomainError("vertical index p must be >= 1")
    return p * math.pi / geometry.plate_gap_l


def cutoff_frequency(geometry, p):
    """Frequency where the exterior stops being evanescent: c*p/(2l)."""
    return C_MM_GHZ * p / (2.0 * geometry.plate_gap_l)


def evanescent_kappa(geometry, f, p):
    """Exterior decay constant kappa_r = sqrt(k_z^2 - (2 pi f / c)^2) in 1/mm.

    Only defined below the parallel-plate cutoff; at or above it the exterior
    propagates and the guided-mode picture fails.
    """
    k_z = kz(geometry, p)
    k0 = 2.0 * math.pi * f / C_MM_GHZ
    if k0 >= k_z:
        raise DomainError(
            f"frequency {f} GHz is at/above the p={p} cutoff "
            f"{cutoff_frequency(geometry, p):.4f} GHz; exterior not evanescent"
        )
    return math.sqrt(k_z * k_z - k0 * k0)


def _transverse_wavenumbers(geometry, f, p):
    """(k_rho interior, kappa_r exterior) for frequency f, both in 1/mm."""
    k_z = kz(geometry, p)
    k0 = 2.0 * math.pi * f / C_MM_GHZ
    krho_sq = geometry.eps_r * k0 * k0 - k_z * k_z
    if krho_sq <= 0.0:
        raise DomainError(
            f"no radially oscillating interior at f = {f} GHz "
            f"(eps_r * k0^2 <= k_z^2 for p = {p})"
        )
    kappa = evanescent_kappa(geometry, f, p)
    return math.sqrt(krho_sq), kappa


def dispersion_residual(geometry, family, m, p, f):
    """Continuity-condition residual at the cylinder wall for frequency f.

    m = 0: two-term match of the radial log-derivatives, cross-multiplied to
    determinant form. TM carries the eps_r weight on the interior term, TE
    carries none. m >= 1: determinant of the coupled TE/TM 2x2 matching
    system for the hybrid modes. Zeros in f, ascending, define n = 1, 2, ...
    """
    if family in (ModeFamily.TM, ModeFamily.TE) and m != 0:
        raise DomainError("TM/TE residual requires m = 0")
    if family is ModeFamily.HEM and m < 1:
        raise DomainError("HEM residual requires m >= 1")
    h, q = _transverse_wavenumbers(geometry, f, p)
    a = geometry.radius
    u = h * a
    w = q * a
    eps = geometry.eps_r
    if family is ModeFamily.TM:
        return eps * q * bessel_j(1, u) * bessel_k(0, w) + h * bessel_j(0, u) * bessel_k(1, w)
    if family is ModeFamily.TE:
        return q * bessel_j(1, u) * bessel_k(0, w) + h * bessel_j(0, u) * bessel_k(1, w)
    # Hybrid: [P][Q] = m^2 (kz/k0)^2 (1/u^2 + 1/w^2)^2 with
    # P = J'/(uJ) + K'/(wK), Q = eps J'/(uJ) + K'/(wK); multiplied through by
    # (u J)(w K) per factor to clear the poles.
    jm = bessel_j(m, u)
    jp = bessel_j_prime(m, u)
    km = bessel_k(m, w)
    kp = bessel_k_prime(m, w)
    p_det = jp * w * km + kp * u * jm
    q_det = eps * jp * w * km + kp * u * jm
    k_z = kz(geometry, p)
    k0 = 2.0 * math.pi * f / C_MM_GHZ
    geom = (u * u + w * w) / (u * w)
    rhs = (m * k_z / k0) ** 2 * geom * geom * (jm * km) ** 2
    return p_det * q_det - rhs


def _scan_band(geometry, p):
    """Frequency band (f_lo, f_hi) on which the residual is defined."""
    k_z = kz(geometry, p)
    f_interior = C_MM_GHZ * k_z / (2.0 * math.pi * math.sqrt(geometry.eps_r))
    f_lo = max(SCAN_F_MIN_GHZ, f_interior * (1.0 + 1e-9))
    f_hi = cutoff_frequency(geometry, p) * (1.0 - 1e-9)
    if f_lo >= f_hi:
        raise NoSuchModeError(f"empty guided band for p = {p}")
    return f_lo, f_hi


def mode_frequencies(geometry, family, m, p, n_max):
    """First n_max dispersion roots (GHz) below cutoff, ascending."""
    f_lo, f_hi = _scan_band(geometry, p)

    def resid(f):
        return dispersion_residual(geometry, family, m, p, f)

    grid = [f_lo + (f_hi - f_lo) * i / (SCAN_POINTS - 1) for i in range(SCAN_POINTS)]
    values = [resid(f) for f in grid]
    roots = []
    for i in range(SCAN_POINTS - 1):
        v0, v1 = values[i], values[i + 1]
        if v0 == 0.0:
            roots.append(grid[i])
        elif v0 * v1 < 0.0:
            roots.append(brent_root(resid, grid[i], grid[i + 1], v0, v1))
        if len(roots) >= n_max:
            break
    return roots[:n_max]


def mode_frequency(geometry, mode):
    """Resonance frequency (GHz) of the given (family, m, n, p) mode."""
    roots = mode_frequencies(geometry, mode.family, mode.m, mode.p, mode.n)
    if len(roots) < mode.n:
        raise NoSuchModeError(
            f"only {len(roots)} {mode.family.value} (m={mode.m}, p={mode.p}) "
            f"roots below cutoff; n = {mode.n} requested"
        )
    return roots[mode.n - 1]


def q_from_width(f, gamma):
    """Quality factor Q = f/gamma from a measured or modeled linewidth."""
    if gamma <= 0:
        raise DomainError("width gamma must be positive")
    return f / gamma


# -- simplified loss budget (m = 0 closed-form fields) -----------------------

def _radial_energy_integrals(geometry, f, p):
    """Bessel quadratic forms entering the m = 0 stored-energy/loss integrals.

    Returns (u, w, h, q, alpha2, Jz, Jrho, Kz, Krho) where Jz/Jrho are the
    interior integrals of J0^2 / J1^2 (units a^2/2 factored out), Kz/Krho the
    exterior K0^2 / K1^2 integrals, and alpha2 the squared exterior/interior
    amplitude ratio fixed by field continuity at the wall.
    """
    h, q = _transverse_wavenumbers(geometry, f, p)
    a = geometry.radius
    u, w = h * a, q * a
    j0, j1 = bessel_j(0, u), bessel_j(1, u)
    j2 = bessel_j(2, u)
    k0b, k1b, k2b = bessel_k(0, w), bessel_k(1, w), bessel_k(2, w)
    alpha2 = (j0 / k0b) ** 2
    jz = j0 * j0 + j1 * j1
    jrho = j1 * j1 - j0 * j2
    kz_int = k1b * k1b - k0b * k0b
    krho = k0b * k2b - k1b * k1b
    return u, w, h, q, alpha2, jz, jrho, kz_int, krho


def q_budget(geometry, mode, surface_resistance, loss_tangent, frequency=None):
    """Order-of-magnitude conductor and dielectric Q for m = 0 modes.

    Q_conductor is the standard perturbation ratio of stored energy to plate
    ohmic loss using the closed-form m = 0 field profile; Q_dielectric is
    1/(loss_tangent * electric-energy filling factor); widths add as
    1/Q_total = 1/Q_c + 1/Q_d. HEM modes have no closed-form profile here and
    are rejected.
    """
    if mode.family is ModeFamily.HEM:
        raise DomainError("q_budget supports TM/TE (m = 0) modes only")
    if surface_resistance <= 0:
        raise DomainError("surface_resistance must be positive")
    if loss_tangent < 0:
        raise DomainError("loss_tangent must be nonnegative")
    f = frequency if frequency is not None else mode_frequency(geometry, mode)
    _, _, h, q, alpha2, jz, jrho, kz_int, krho = _radial_energy_integrals(geometry, f, p=mode.p)
    eps = geometry.eps_r
    k_z = kz(geometry, mode.p)
    omega = 2.0 * math.pi * f * 1e9
    eps0 = 8.8541878128e-12
    mu0 = 4.0e-7 * math.pi
    l_m = geometry.plate_gap_l * 1e-3
    h_m = h * 1e3  # 1/mm -> 1/m
    q_m = q * 1e3
    kz_m = k_z * 1e3

    if mode.family is ModeFamily.TM:
        # E_z ~ J0 cos(kz z); E_rho ~ (kz/h) J1 sin; H_phi ~ (w eps0 eps/h) J1 cos.
        energy = eps * (jz + (kz_m / h_m) ** 2 * jrho) + alpha2 * (
            kz_int + (kz_m / q_m) ** 2 * krho
        )
        plate_loss = (eps / h_m) ** 2 * jrho + alpha2 * krho / q_m**2
        q_c = l_m * energy / (4.0 * surface_resistance * omega * eps0 * plate_loss)
        e_in = eps * (jz + (kz_m / h_m) ** 2 * jrho)
        filling = e_in / energy
    else:
        # TE: H_z ~ J0 sin(kz z); H_rho ~ (kz/h) J1 cos; E_phi ~ (w mu0/h) J1 sin.
        energy = jz + (kz_m / h_m) ** 2 * jrho + alpha2 * (
            kz_int + (kz_m / q_m) ** 2 * krho
        )
        plate_loss = (kz_m / h_m) ** 2 * jrho + alpha2 * (kz_m / q_m) ** 2 * krho
        q_c = omega * mu0 * l_m * energy / (4.0 * surface_resistance * plate_loss)
        # Electric energy lives in E_phi alone; interior share sets the fill.
        e_in = eps * jrho / h_m**2
        e_out = alpha2 * krho / q_m**2
        filling = e_in / (e_in + e_out)

    q_d = math.inf if loss_tangent == 0 else 1.0 / (loss_tangent * filling)
    q_total = q_c if loss_tangent == 0 else 1.0 / (1.0 / q_c + 1.0 / q_d)
    return q_c, q_d, q_total
