"""Shared numerical kernels: Bessel functions on a validated range, the
decaying-branch complex square root, complex Newton root finding with grid
seeding, and a small dense complex eigensolver.

Every function here is pure and deterministic; identical inputs give
bit-identical outputs.
"""

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.special as sp

from .errors import ConvergenceError, DomainError

# Validated argument ranges for the Bessel evaluations used by the
# dispersion solver (orders up to m+1 appear in derivative recurrences).
BESSEL_MAX_ORDER = 12
BESSEL_J_MAX_X = 100.0
BESSEL_K_MIN_X = 1e-6
BESSEL_K_MAX_X = 100.0


def _check_finite(value, what):
    if isinstance(value, complex):
        ok = math.isfinite(value.real) and math.isfinite(value.imag)
    else:
        ok = math.isfinite(value)
    if not ok:
        raise DomainError(f"{what} is not finite: {value!r}")
    return value


def bessel_j(order, x):
    """Bessel function of the first kind J_order(x).

    Valid for integer 0 <= order <= 12 and 0 <= x <= 100; out-of-range
    arguments raise DomainError rather than returning a possibly inaccurate
    value.
    """
    if not (0 <= order <= BESSEL_MAX_ORDER) or order != int(order):
        raise DomainError(f"bessel_j order {order} outside validated 0..{BESSEL_MAX_ORDER}")
    if not (0.0 <= x <= BESSEL_J_MAX_X):
        raise DomainError(f"bessel_j argument {x} outside validated [0, {BESSEL_J_MAX_X}]")
    return _check_finite(float(sp.jv(int(order), x)), "bessel_j")


def bessel_j_prime(order, x):
    """dJ_m/dx via the recurrence J'_m = (J_{m-1} - J_{m+1})/2, J_{-1} = -J_1."""
    if order == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(order - 1, x) - bessel_j(order + 1, x))


def bessel_k(order, x):
    """Modified Bessel function of the second kind K_order(x).

    Valid for integer 0 <= order <= 12 and 1e-6 <= x <= 100. x <= 0 is a
    genuine domain error (K has a branch point at 0).
    """
    if not (0 <= order <= BESSEL_MAX_ORDER) or order != int(order):
        raise DomainError(f"bessel_k order {order} outside validated 0..{BESSEL_MAX_ORDER}")
    if x <= 0.0:
        raise DomainError(f"bessel_k argument must be positive, got {x}")
    if not (BESSEL_K_MIN_X <= x <= BESSEL_K_MAX_X):
        raise DomainError(f"bessel_k argument {x} outside validated [{BESSEL_K_MIN_X}, {BESSEL_K_MAX_X}]")
    return _check_finite(float(sp.kv(int(order), x)), "bessel_k")


def bessel_k_prime(order, x):
    """dK_m/dx via K'_m = -(K_{m-1} + K_{m+1})/2, K_{-1} = K_1."""
    lower = bessel_k(1, x) if order == 0 else bessel_k(order - 1, x)
    return -0.5 * (lower + bessel_k(order + 1, x))


def sqrt_decaying(z):
    """Square root on the decaying branch: w*w == z with Re(w) >= 0.

    Ties on the imaginary axis (Re(w) == 0) resolve to Im(w) >= 0. Applied
    uniformly to every exterior/barrier wavevector so that exp(-w*x) decays.
    """
    w = cmath.sqrt(complex(z))
    if w.real < 0.0 or (w.real == 0.0 and w.imag < 0.0):
        w = -w
    return _check_finite(w, "sqrt_decaying")


@dataclass(frozen=True)
class RootFindConfig:
    """Controls for the complex Newton iteration."""

    tolerance: float = 1e-12
    max_iterations: int = 60
    step_for_numeric_derivative: float = 1e-7

    def __post_init__(self):
        if self.tolerance <= 0:
            raise DomainError("tolerance must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        if self.step_for_numeric_derivative <= 0:
            raise DomainError("derivative step must be positive")


def find_root_complex(residual, seed, config=RootFindConfig()):
    """Newton iteration with central-difference derivative on a complex map.

    Converges when |residual(z)| <= config.tolerance; raises ConvergenceError
    (carrying the last iterate and its residual magnitude) after
    max_iterations. The caller is responsible for seeding inside the basin;
    see scan_seeds.
    """
    z = complex(seed)
    f = complex(residual(z))
    best_z, best_f = z, abs(f)
    for _ in range(config.max_iterations):
        if abs(f) <= config.tolerance:
            return _check_finite(z, "root")
        h = config.step_for_numeric_derivative * max(1.0, abs(z))
        df = (complex(residual(z + h)) - complex(residual(z - h))) / (2.0 * h)
        if df == 0:
            break
        step = f / df
        # Damp pathological jumps far outside the current scale.
        limit = 10.0 * max(1.0, abs(z))
        if abs(step) > limit:
            step *= limit / abs(step)
        z = z - step
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            break
        f = complex(residual(z))
        if abs(f) < best_f:
            best_z, best_f = z, abs(f)
    if best_f <= config.tolerance:
        return best_z
    raise ConvergenceError(
        f"no convergence after {config.max_iterations} iterations (|residual| = {best_f:.3e})",
        last_iterate=best_z,
        residual_magnitude=best_f,
    )


def scan_seeds(residual, rectangle, grid):
    """Local minima of |residual| on a rectangular grid, best first.

    rectangle is ((re_min, re_max), (im_min, im_max)); grid is (nx, ny) with
    nx, ny >= 2. Minima are grid points not exceeded by any existing
    4-neighbour, sorted by ascending |residual| with row-major order breaking
    ties, so the output is deterministic.
    """
    (re_min, re_max), (im_min, im_max) = rectangle
    nx, ny = grid
    if nx < 2 or ny < 2:
        raise DomainError("grid must be at least 2x2")
    if not (re_max > re_min) or not (im_max > im_min):
        raise DomainError("empty scan box")
    res = np.linspace(re_min, re_max, nx)
    ims = np.linspace(im_min, im_max, ny)
    mag = np.empty((ny, nx))
    for j, y in enumerate(ims):
        for i, x in enumerate(res):
            mag[j, i] = abs(complex(residual(complex(x, y))))
    minima = []
    for j in range(ny):
        for i in range(nx):
            v = mag[j, i]
            if i > 0 and mag[j, i - 1] < v:
                continue
            if i < nx - 1 and mag[j, i + 1] < v:
                continue
            if j > 0 and mag[j - 1, i] < v:
                continue
            if j < ny - 1 and mag[j + 1, i] < v:
                continue
            minima.append((v, j, i, complex(res[i], ims[j])))
    minima.sort(key=lambda t: (t[0], t[1], t[2]))
    return [m[3] for m in minima]


def brent_root(fun, x_lo, x_hi, f_lo=None, f_hi=None, tol=1e-13, max_iter=200):
    """Brent's method on a bracketed sign change of a real function."""
    a, b = x_lo, x_hi
    fa = fun(a) if f_lo is None else f_lo
    fb = fun(b) if f_hi is None else f_hi
    if fa * fb > 0:
        raise DomainError("root not bracketed")
    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if fb * fc > 0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * 2.22e-16 * abs(b) + 0.5 * tol
        xm = 0.5 * (c - b)
        if abs(xm) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * xm * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * xm * q - abs(tol1 * q), abs(e * q)):
                e = d
                d = p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        b = b + (d if abs(d) > tol1 else math.copysign(tol1, xm))
        fb = fun(b)
    return b


def eig_complex_dense(H):
    """Eigenpairs of a dense complex matrix, N <= 16.

    Returns a list of (eigenvalue, eigenvector) sorted by ascending real
    part, ties by ascending imaginary part. Eigenvectors have unit Euclidean
    norm and their first significant component rotated to be real positive,
    which fixes the phase deterministically. Each pair satisfies
    ||H v - lam v|| <= 1e-10 ||H||; a violation raises ConvergenceError.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {H.shape}")
    n = H.shape[0]
    if n > 16:
        raise DomainError(f"dense eigensolver limited to N <= 16, got {n}")
    if not np.all(np.isfinite(H.view(float))):
        raise DomainError("matrix entries must be finite")
    try:
        vals, vecs = np.linalg.eig(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"eigensolver iteration failed: {exc}") from exc
    order = np.lexsort((vals.imag, vals.real))
    norm_h = np.linalg.norm(H, 2)
    pairs = []
    for idx in order:
        lam = complex(vals[idx])
        v = vecs[:, idx].copy()
        v /= np.linalg.norm(v)
        anchor = np.argmax(np.abs(v) > 1e-12)
        phase = v[anchor] / abs(v[anchor])
        v = v / phase
        v[anchor] = v[anchor].real + 0.0j
        resid = np.linalg.norm(H @ v - lam * v)
        if resid > 1e-10 * max(norm_h, 1e-300):
            raise ConvergenceError(
                f"eigenpair residual {resid:.3e} exceeds contract for ||H|| = {norm_h:.3e}",
                residual_magnitude=resid,
            )
        pairs.append((lam, v))
    _warn_if_defective(pairs, norm_h)
    return pairs


def _warn_if_defective(pairs, norm_h):
    """Flag repeated eigenvalues whose eigenvectors are nearly parallel."""
    scale = max(norm_h, 1e-300)
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            if abs(pairs[i][0] - pairs[j][0]) > 1e-12 * scale:
                continue
            overlap = abs(np.vdot(pairs[i][1], pairs[j][1]))
            if overlap > 1.0 - 1e-8:
                warnings.warn(
                    "matrix is defective to tolerance; eigenvectors may be ill-conditioned",
                    RuntimeWarning,
                    stacklevel=3,
                )
                return
