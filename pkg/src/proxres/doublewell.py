"""Quasi-bound states of a 1D complex double-well potential.

The potential (units hbar = 2m = 1, lengths in disk diameters D, energies in
D^-2) is

    V(x) = V0 + i*V1   for |x| > d/2 + 1      (outer region)
           i*V2        for d/2 < |x| < d/2+1  (the two wells, width 1 each)
           Vb + i*V1   for |x| < d/2          (central barrier)

with V1, V2 <= 0 acting as absorbers. Even (S) and odd (A) quasi-bound
levels E = eps - i*gamma/2 are roots of a transfer-matrix determinant built
from half-line data: a parity-symmetric barrier solution is propagated
across one well and matched to a purely decaying exterior. The residual is
entire in the propagated quantities (no log-derivative quotients), so
complex Newton iteration is safe, and a finite-difference discretization of
the full line serves as an independent cross-check (fd_oracle).
"""

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import scipy.linalg

from .diskmode import ResonanceLine
from .errors import BoxError, ConvergenceError, DomainError, GainError, NoSuchModeError
from .numerics import RootFindConfig, brent_root, find_root_complex, sqrt_decaying

HERMITIAN_SCAN_POINTS = 2001


class Parity(Enum):
    EVEN = "S"
    ODD = "A"


@dataclass(frozen=True)
class DoubleWellSpec:
    """Complex double-well parameters; the well width is fixed at 1 (= D)."""

    V0: float
    V1: float
    V2: float
    Vb: float
    d: float

    def __post_init__(self):
        if self.V0 <= 0:
            raise DomainError("V0 must be positive")
        if not (0 < self.Vb <= self.V0):
            raise DomainError("require 0 < Vb <= V0")
        if self.d < 0:
            raise DomainError("well separation d must be >= 0")
        if self.V1 > 0 or self.V2 > 0:
            raise DomainError("V1, V2 model absorption and must be <= 0")
        if abs(self.V1) > 0.2 * self.V0 or abs(self.V2) > 0.2 * self.V0:
            raise DomainError("|V1|, |V2| must stay perturbative (<= 0.2 V0)")

    def potential(self, x):
        """V at a point, with jump points taking the mean of both limits."""
        ax = abs(x)
        x1 = 0.5 * self.d
        x2 = x1 + 1.0
        v_bar = self.Vb + 1j * self.V1
        v_well = 1j * self.V2
        v_out = self.V0 + 1j * self.V1
        if ax == x1 and self.d > 0:
            return 0.5 * (v_bar + v_well)
        if ax == x2:
            return 0.5 * (v_well + v_out)
        if ax < x1:
            return v_bar
        if ax < x2:
            return v_well
        return v_out


@dataclass(frozen=True)
class QuasiBoundLevel:
    """One quasi-bound level: E = energy_eps - i*width_gamma/2."""

    parity: Parity
    energy_eps: float
    width_gamma: float
    level_index: int

    @property
    def energy(self):
        return complex(self.energy_eps, -0.5 * self.width_gamma)


@dataclass(frozen=True)
class DoubletResult:
    """Paired even/odd levels with splitting and width ratio."""

    level_S: QuasiBoundLevel
    level_A: QuasiBoundLevel
    delta_eps: float
    width_ratio: float  # gamma_S / gamma_A; +inf when gamma_A == 0


def _sinhc(z):
    """sinh(z)/z, entire, accurate near 0."""
    if abs(z) < 1e-6:
        z2 = z * z
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0
    return cmath.sinh(z) / z


def _sinc(z):
    """sin(z)/z, entire, accurate near 0."""
    if abs(z) < 1e-6:
        z2 = z * z
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0
    return cmath.sin(z) / z


def _residual_parts(spec, parity, E):
    """(residual, scale) of the parity matching determinant at energy E.

    The barrier solution is normalized so it stays real for real E on both
    sides of E = Vb; the scale accompanies the raw value so callers can
    judge convergence independently of the cosh growth with d.
    """
    E = complex(E)
    half_d = 0.5 * spec.d
    kb = sqrt_decaying(spec.Vb + 1j * spec.V1 - E)
    k_well_sq = E - 1j * spec.V2
    k = sqrt_decaying(k_well_sq)
    kout = sqrt_decaying(spec.V0 + 1j * spec.V1 - E)

    ch = cmath.cosh(kb * half_d)
    sh_over = half_d * _sinhc(kb * half_d)  # sinh(kb d/2)/kb, entire in kb^2
    if parity is Parity.EVEN:
        psi, dpsi = ch, kb * kb * sh_over
    else:
        psi, dpsi = sh_over, ch

    c = cmath.cos(k)
    s = _sinc(k)  # sin(k)/k, entire in k^2
    psi2 = psi * c + dpsi * s
    dpsi2 = -k_well_sq * psi * s + dpsi * c

    residual = dpsi2 + kout * psi2
    scale = abs(dpsi2) + abs(kout * psi2) + 1e-300
    return residual, scale


def parity_residual(spec, parity, E):
    """Pole-free residual whose zeros in E are the parity-P levels."""
    residual, _ = _residual_parts(spec, parity, E)
    return residual


def _scaled_residual(spec, parity):
    def fun(E):
        residual, scale = _residual_parts(spec, parity, E)
        return residual / scale

    return fun


def hermitian_levels(spec, parity, count=None):
    """Real bound-state energies of the V1 = V2 = 0 problem, ascending.

    Brackets sign changes of the (real) residual on (0, V0) and refines each
    with Brent's method; covers barrier-top crossing without special cases
    because the residual is entire in E.
    """
    h_spec = replace(spec, V1=0.0, V2=0.0)

    def resid(eps):
        return _residual_parts(h_spec, parity, complex(eps, 0.0))[0].real

    lo = 1e-9 * spec.V0
    hi = spec.V0 * (1.0 - 1e-12)
    grid = np.linspace(lo, hi, HERMITIAN_SCAN_POINTS)
    values = [resid(e) for e in grid]
    roots = []
    for i in range(len(grid) - 1):
        v0, v1 = values[i], values[i + 1]
        if v0 == 0.0:
            roots.append(float(grid[i]))
        elif v0 * v1 < 0.0:
            roots.append(brent_root(resid, float(grid[i]), float(grid[i + 1]), v0, v1))
        if count is not None and len(roots) >= count:
            break
    return roots


def _ramp_steps(spec):
    return max(4, int(math.ceil(max(abs(spec.V1), abs(spec.V2)) / 10.0)))


def _refine(spec, parity, seed, config=None):
    """Newton-polish a complex level from a nearby seed."""
    cfg = config or RootFindConfig(tolerance=1e-11, max_iterations=80)
    return find_root_complex(_scaled_residual(spec, parity), seed, cfg)


def solve_level(spec, parity, level_index=1, config=None):
    """Quasi-bound level by continuation from the Hermitian problem.

    Solves V1 = V2 = 0 by real bracketing, then ramps the imaginary
    potentials to their targets in >= 4 steps with a Newton polish at each
    step. Absorbing inputs must yield Im(E) <= 0; a positive imaginary part
    signals a solver failure and is reported as such.
    """
    if level_index < 1:
        raise DomainError("level_index must be >= 1")
    roots = hermitian_levels(spec, parity, count=level_index)
    if len(roots) < level_index:
        raise NoSuchModeError(
            f"only {len(roots)} {parity.value} levels below V0; "
            f"level {level_index} requested"
        )
    energy = complex(roots[level_index - 1], 0.0)
    if spec.V1 == 0.0 and spec.V2 == 0.0:
        return QuasiBoundLevel(parity, energy.real, 0.0, level_index)

    steps = _ramp_steps(spec)
    for j in range(1, steps + 1):
        t = j / steps
        spec_t = replace(spec, V1=t * spec.V1, V2=t * spec.V2)
        try:
            energy = _refine(spec_t, parity, energy, config)
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"continuation stalled at ramp fraction {t:.3f} for parity "
                f"{parity.value}: {exc}",
                last_iterate=exc.last_iterate,
                residual_magnitude=exc.residual_magnitude,
            ) from exc
    return _level_from_energy(spec, parity, energy, level_index)


def _level_from_energy(spec, parity, energy, level_index):
    gamma = -2.0 * energy.imag
    if gamma < -1e-10:
        raise GainError(
            f"converged level has gain (gamma = {gamma:.3e}) for absorbing potentials"
        )
    gamma = max(gamma, 0.0)
    if not (0.0 < energy.real < spec.V0):
        raise ConvergenceError(
            f"level escaped the bound window: eps = {energy.real}",
            last_iterate=energy,
        )
    return QuasiBoundLevel(parity, energy.real, gamma, level_index)


def doublet(spec, level_index=1, config=None):
    """Even/odd pair at the given level index with splitting and ratio."""
    level_s = solve_level(spec, Parity.EVEN, level_index, config)
    level_a = solve_level(spec, Parity.ODD, level_index, config)
    return _pair(level_s, level_a)


def _pair(level_s, level_a):
    delta = level_a.energy_eps - level_s.energy_eps
    if level_a.width_gamma > 0.0:
        ratio = level_s.width_gamma / level_a.width_gamma
    else:
        ratio = math.inf
    return DoubletResult(level_s, level_a, delta, ratio)


def sweep_distance(spec_template, d_values, level_index=1, config=None):
    """Doublet at each separation of an increasing d grid.

    Each point is solved by the full Hermitian-seeded continuation rather
    than by Newton from the previous point: warm-started iterations can hop
    to a neighbouring level where the barrier is transparent and levels move
    quickly with d, while the bracketing scan pins the level identity at
    negligible extra cost. Sequential and deterministic. Solver failures
    leave a (d, None) gap entry instead of aborting the sweep.
    """
    d_values = list(d_values)
    if any(b <= a for a, b in zip(d_values, d_values[1:])):
        raise DomainError("d_values must be strictly increasing")
    if d_values and d_values[0] < 0:
        raise DomainError("separations must be >= 0")
    rows = []
    for d in d_values:
        spec_d = replace(spec_template, d=d)
        try:
            rows.append((d, doublet(spec_d, level_index, config)))
        except (ConvergenceError, NoSuchModeError, GainError):
            rows.append((d, None))
    return rows


def mean_inter_well_kappa(spec, rows):
    """Re sqrt(Vb + i V1 - eps_mean) over the successful sweep rows."""
    eps = [
        0.5 * (res.level_S.energy_eps + res.level_A.energy_eps)
        for _, res in rows
        if res is not None
    ]
    if not eps:
        raise DomainError("no successful rows to average")
    eps_mean = sum(eps) / len(eps)
    return sqrt_decaying(spec.Vb + 1j * spec.V1 - eps_mean).real


def fit_splitting(d_values, delta_eps_values, kappa_r, min_kappa_d=1.0):
    """Exponential fit ln(delta_eps) = ln(prefactor) - decay*d on the
    tunneling window kappa_r*d >= min_kappa_d.

    Returns (decay_constant, prefactor, rms_log_residual).
    """
    d = np.asarray(list(d_values), dtype=float)
    de = np.asarray(list(delta_eps_values), dtype=float)
    if d.shape != de.shape:
        raise DomainError("d and delta_eps lists must have equal length")
    mask = kappa_r * d >= min_kappa_d
    if int(mask.sum()) < 3:
        raise DomainError("need at least 3 points with kappa_r*d >= threshold")
    if np.any(de[mask] <= 0.0):
        raise DomainError("delta_eps must be positive throughout the fit window")
    x = d[mask]
    y = np.log(de[mask])
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(residuals**2)))
    return float(-slope), float(np.exp(intercept)), rms


def qm_to_em(E_qm, frequency_scale):
    """Map a quantum complex energy to an electromagnetic resonance line.

    (f - i*gamma/2)_EM = frequency_scale * sqrt(E_qm), using the decaying
    branch, so f = Re and gamma = -2 Im of the complex frequency.
    """
    E_qm = complex(E_qm)
    if E_qm.real <= 0:
        raise DomainError("Re(E_qm) must be positive to map to a frequency")
    if E_qm.imag > 0:
        raise GainError("Im(E_qm) > 0 would describe gain, not absorption")
    freq = frequency_scale * sqrt_decaying(E_qm)
    return ResonanceLine.from_frequency_width(freq.real, -2.0 * freq.imag)


# -- finite-difference oracle -------------------------------------------------

def _fd_matrix_diagonals(spec, step, halfwidth):
    """Interior grid and tridiagonal (diag, offdiag) of -psi'' + V psi.

    Nodes landing on a potential jump (within float noise of the grid) take
    the mean of both one-sided limits, which keeps the eigenvalue error a
    clean O(h^2) suitable for Richardson extrapolation.
    """
    n_cells = int(round(2.0 * halfwidth / step))
    x = np.linspace(-halfwidth, halfwidth, n_cells + 1)[1:-1]
    x1 = 0.5 * spec.d
    x2 = x1 + 1.0
    v_bar = spec.Vb + 1j * spec.V1
    v_well = 1j * spec.V2
    v_out = spec.V0 + 1j * spec.V1
    tol = 1e-6 * step
    ax = np.abs(x)
    v = np.where(ax < x1, v_bar, np.where(ax < x2, v_well, v_out))
    if spec.d > 0:
        v[np.abs(ax - x1) <= tol] = 0.5 * (v_bar + v_well)
    v[np.abs(ax - x2) <= tol] = 0.5 * (v_well + v_out)
    inv_h2 = 1.0 / (step * step)
    diag = 2.0 * inv_h2 + v
    return x, diag, -inv_h2


def _coarse_levels(spec, halfwidth, level_count):
    """Dense solve on a coarse grid to locate the well states."""
    step = 0.02
    x, diag, off = _fd_matrix_diagonals(spec, step, halfwidth)
    n = len(diag)
    mat = np.diag(diag) + np.diag(np.full(n - 1, off), 1) + np.diag(np.full(n - 1, off), -1)
    vals, vecs = np.linalg.eig(mat)
    order = np.argsort(vals.real)
    picked = []
    for idx in order:
        lam = vals[idx]
        if 0.0 < lam.real < spec.V0:
            picked.append((complex(lam), vecs[:, idx], x))
        if len(picked) >= level_count:
            break
    if len(picked) < level_count:
        raise NoSuchModeError(
            f"coarse grid found only {len(picked)} states in (0, V0)"
        )
    return picked


def _parity_project(v, sign):
    return 0.5 * (v + sign * v[::-1])


def _dominant_parity(v):
    even = np.linalg.norm(_parity_project(v, +1.0))
    odd = np.linalg.norm(_parity_project(v, -1.0))
    return +1.0 if even >= odd else -1.0


def _rqi_banded(diag, off, sigma, v0, parity_sign, max_iter=60):
    """Parity-preserving Rayleigh-quotient iteration on a complex
    symmetric tridiagonal matrix (banded LU solves)."""
    n = len(diag)
    v = _parity_project(v0, parity_sign)
    norm = np.linalg.norm(v)
    if norm < 1e-200:
        raise ConvergenceError("start vector has no component of requested parity")
    v = v / norm
    lam = complex(sigma)
    band = np.zeros((3, n), dtype=complex)
    prev_delta = math.inf
    for _ in range(max_iter):
        band[0, 1:] = off
        band[1, :] = diag - lam
        band[2, :-1] = off
        try:
            w = scipy.linalg.solve_banded((1, 1), band, v)
        except scipy.linalg.LinAlgError:
            # Shift exactly on an eigenvalue: nudge and retry.
            lam = lam * (1.0 + 1e-12) + 1e-12
            continue
        w = _parity_project(w, parity_sign)
        w = w / np.linalg.norm(w)
        # Quasi-Rayleigh quotient of a complex symmetric matrix: v^T A v / v^T v.
        av = diag * w
        av[:-1] += off * w[1:]
        av[1:] += off * w[:-1]
        vtv = np.dot(w, w)
        lam_new = np.dot(w, av) / vtv
        v = w
        scale = max(1.0, abs(lam_new))
        delta = abs(lam_new - lam)
        lam = lam_new
        if delta <= 1e-13 * scale:
            return complex(lam), v
        # The quotient has a roundoff floor ~ eps*||A||/|lam|; accept once
        # the update stops shrinking at a level far below the h^2 error.
        if delta >= 0.5 * prev_delta and prev_delta <= 1e-9 * scale:
            return complex(lam), v
        prev_delta = delta
    raise ConvergenceError("inverse iteration did not settle", last_iterate=lam)


def _refine_on_grid(spec, step, halfwidth, shifts_and_starts):
    x, diag, off = _fd_matrix_diagonals(spec, step, halfwidth)
    refined = []
    for sigma, v_coarse, x_coarse, parity_sign in shifts_and_starts:
        v0 = np.interp(x, x_coarse, v_coarse.real) + 1j * np.interp(
            x, x_coarse, v_coarse.imag
        )
        lam, vec = _rqi_banded(diag, off, sigma, v0, parity_sign)
        refined.append((lam, vec))
    return refined


def fd_oracle(spec, level_count, grid_step_h=1.0 / 400.0, box_halfwidth_X=None,
              return_vectors=False):
    """Independent eigenvalues from a central-difference discretization.

    Solves -psi'' + V psi = E psi on [-X, X] with Dirichlet ends at steps h
    and h/2, checks |lam(h) - lam(h/2)| <= 1e-4 |lam| and returns the
    Richardson extrapolants, sorted by real part. Jump points of V are most
    accurately handled when d/2 is a multiple of h (tests choose such grids).
    Raises BoxError when the eigenvector tail at the boundary exceeds 1e-8
    of its peak.
    """
    if grid_step_h > 0.01:
        raise DomainError("grid_step_h must be <= 0.01")
    # Snap the step to 1/integer so the well edges fall on nodes.
    m_cells = int(round(1.0 / grid_step_h))
    step = 1.0 / m_cells
    x2 = 0.5 * spec.d + 1.0
    if box_halfwidth_X is None:
        kappa_out = math.sqrt(max(spec.V0 * 0.9, 1.0))
        margin = max(20.0 / kappa_out, 0.25)
        box_halfwidth_X = x2 + margin
    halfwidth = x2 + math.ceil((box_halfwidth_X - x2) / step) * step
    if halfwidth < x2:
        raise BoxError("box must contain the wells (X >= d/2 + 1)")

    coarse = _coarse_levels(spec, halfwidth, level_count)
    starts = [
        (lam, vec, xg, _dominant_parity(vec)) for lam, vec, xg in coarse
    ]
    # Degenerate doublets may come out parity-mixed on the coarse grid; make
    # sure both parities are represented when two shifts nearly coincide.
    for i in range(1, len(starts)):
        lam_i, vec_i, xg_i, sign_i = starts[i]
        lam_j, _, _, sign_j = starts[i - 1]
        if abs(lam_i - lam_j) < 1e-6 * max(1.0, abs(lam_i)) and sign_i == sign_j:
            starts[i] = (lam_i, vec_i, xg_i, -sign_i)

    res_h = _refine_on_grid(spec, step, halfwidth, starts)
    res_h2 = _refine_on_grid(spec, 0.5 * step, halfwidth, starts)

    out = []
    for (lam_h, _), (lam_h2, vec_h2) in zip(res_h, res_h2):
        if abs(lam_h - lam_h2) > 1e-4 * abs(lam_h2):
            raise ConvergenceError(
                f"Richardson check failed: lam(h) = {lam_h}, lam(h/2) = {lam_h2}"
            )
        tail = max(abs(vec_h2[0]), abs(vec_h2[-1]))
        if tail > 1e-8 * np.max(np.abs(vec_h2)):
            raise BoxError(
                f"eigenvector tail {tail:.2e} at the boundary; enlarge the box"
            )
        extrapolated = (4.0 * lam_h2 - lam_h) / 3.0
        out.append((extrapolated, vec_h2))
    out.sort(key=lambda t: t[0].real)
    if return_vectors:
        xs = np.linspace(-halfwidth, halfwidth, int(round(2 * halfwidth / (0.5 * step))) + 1)[1:-1]
        return [(lam, vec, xs) for lam, vec in out]
    return [lam for lam, _ in out]
