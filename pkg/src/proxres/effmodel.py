"""N-site non-Hermitian effective Hamiltonians for coupled resonators.

Sites are single-disk bound modes; decay channels are either common (the
metal plates, one amplitude vector coupling coherently to every site) or
individual (dielectric loss, one channel per site). The model Hamiltonian is

    H = diag(site_energies) - [T_ij] - (i/2) * Gamma,   Gamma = sum_c w_c w_c^†

with symmetric tunneling couplings T_ij = T0 * exp(-kappa * (r_ij - 1))
evaluated at edge-to-edge distance (centres are measured in disk diameters,
so r_ij - 1 is the gap). A common channel makes the site-symmetric
combination superradiant (width ~ N * gamma_c) and leaves N-1 dark modes
whose width floor is set by the individual channels.
"""

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .doublewell import qm_to_em
from .errors import DomainError, GeometryError
from .numerics import eig_complex_dense

DEFAULT_SITE_ENERGY = 1.0


class ChannelKind(Enum):
    COMMON = "common"
    INDIVIDUAL = "individual"


@dataclass(frozen=True)
class DecayChannel:
    """One decay channel: amplitudes w (per site), contributing w w^† to Gamma."""

    kind: ChannelKind
    amplitudes: tuple

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(complex(a) for a in self.amplitudes))

    def vector(self, n_sites):
        w = np.array(self.amplitudes, dtype=complex)
        if w.shape != (n_sites,):
            raise DomainError(
                f"channel amplitude vector has length {w.shape[0]}, expected {n_sites}"
            )
        return w


@dataclass(frozen=True)
class CouplingRule:
    """Exponential tunneling rule T_ij = T0 * exp(-kappa * (r_ij - 1)).

    kappa may be complex: its real part (required > 0) sets the evanescent
    decay, an imaginary part adds the oscillating phase that dresses the
    coupling.
    """

    T0: float
    kappa: complex
    disk_diameter: float = 1.0

    def __post_init__(self):
        if self.T0 <= 0:
            raise DomainError("T0 must be positive")
        if complex(self.kappa).real <= 0:
            raise DomainError("Re(kappa) must be positive")

    def coupling(self, distance):
        return self.T0 * cmath.exp(-complex(self.kappa) * (distance - self.disk_diameter))


@dataclass(frozen=True)
class SiteNetwork:
    """Sites, couplings, and decay channels of the effective model.

    Couplings come either from positions + coupling_rule (centre coordinates
    in units of the disk diameter) or from an explicit symmetric
    coupling_override matrix with zero diagonal.
    """

    site_energies: tuple
    channels: tuple
    positions: tuple = None
    coupling_rule: CouplingRule = None
    coupling_override: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "site_energies", tuple(float(e) for e in self.site_energies))
        object.__setattr__(self, "channels", tuple(self.channels))
        if self.positions is not None:
            object.__setattr__(
                self, "positions", tuple((float(x), float(y)) for x, y in self.positions)
            )
            if len(self.positions) != self.n_sites:
                raise DomainError("positions and site_energies must have equal length")
            if self.coupling_rule is None:
                raise DomainError("positions require a coupling_rule")
        elif self.coupling_override is None:
            raise DomainError("provide either positions or a coupling_override")
        if self.coupling_override is not None:
            mat = np.array(self.coupling_override, dtype=complex)
            if mat.shape != (self.n_sites, self.n_sites):
                raise DomainError("coupling_override must be N x N")
            if not np.allclose(mat, mat.T, rtol=0, atol=0):
                raise DomainError("couplings must be symmetric (T_ij = T_ji)")
            if np.any(mat.diagonal() != 0):
                raise DomainError("self-couplings T_ii must vanish")
            object.__setattr__(
                self, "coupling_override", tuple(tuple(row) for row in mat.tolist())
            )

    @property
    def n_sites(self):
        return len(self.site_energies)

    def coupling_matrix(self):
        n = self.n_sites
        if self.coupling_override is not None:
            return np.array(self.coupling_override, dtype=complex)
        t = np.zeros((n, n), dtype=complex)
        for i in range(n):
            for j in range(i + 1, n):
                dx = self.positions[i][0] - self.positions[j][0]
                dy = self.positions[i][1] - self.positions[j][1]
                dist = math.hypot(dx, dy)
                if dist <= self.coupling_rule.disk_diameter:
                    raise GeometryError(
                        f"disks {i} and {j} overlap (centre distance {dist:.4f} <= 1)"
                    )
                t[i, j] = t[j, i] = self.coupling_rule.coupling(dist)
        return t

    def decay_matrix(self):
        n = self.n_sites
        gamma = np.zeros((n, n), dtype=complex)
        for channel in self.channels:
            w = channel.vector(n)
            gamma += np.outer(w, w.conj())
        return gamma


def build_heff(network):
    """H = diag(eps) - [T_ij] - (i/2) Gamma as a dense complex matrix."""
    t = network.coupling_matrix()
    gamma = network.decay_matrix()
    return np.diag(np.array(network.site_energies, dtype=complex)) - t - 0.5j * gamma


@dataclass(frozen=True)
class ModeReport:
    """One eigenmode: complex eigenvalue, width, symmetry label, vector."""

    eigenvalue: complex
    width: float
    irrep_label: str
    irrep_score: float
    vector: np.ndarray = field(repr=False, compare=False)


class SymmetryGroup(Enum):
    Z2 = "Z2"
    C3V = "C3v"


def classify_symmetry(vector, group):
    """Irrep of the site-permutation representation carrying the vector.

    Reports the subspace holding more than 99% of the norm, otherwise
    'mixed'; the score is always the largest projection norm^2. For C3v on
    three sites only A1 and E occur (A2 is absent from the permutation
    representation).
    """
    v = np.asarray(vector, dtype=complex)
    norm2 = float(np.vdot(v, v).real)
    if norm2 == 0:
        raise DomainError("cannot classify the zero vector")
    if group is SymmetryGroup.Z2:
        if v.shape != (2,):
            raise DomainError("Z2 classification needs a 2-vector")
        basis = {"even": np.array([1.0, 1.0]) / math.sqrt(2.0)}
        scores = {
            "even": abs(np.vdot(basis["even"], v)) ** 2 / norm2,
        }
        scores["odd"] = abs(np.vdot(np.array([1.0, -1.0]) / math.sqrt(2.0), v)) ** 2 / norm2
    elif group is SymmetryGroup.C3V:
        if v.shape != (3,):
            raise DomainError("C3v classification needs a 3-vector")
        a1 = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
        p_a1 = abs(np.vdot(a1, v)) ** 2 / norm2
        scores = {"A1": p_a1, "E": 1.0 - p_a1}
    else:
        raise DomainError(f"unsupported group {group}")
    label = max(scores, key=lambda k: scores[k])
    if scores[label] > 0.99:
        return label, scores[label]
    return "mixed", scores[label]


def spectrum(network):
    """Eigenmodes of build_heff, ascending in Re(eigenvalue), labeled."""
    h = build_heff(network)
    n = network.n_sites
    group = SymmetryGroup.Z2 if n == 2 else SymmetryGroup.C3V if n == 3 else None
    reports = []
    for lam, vec in eig_complex_dense(h):
        if group is not None:
            label, score = classify_symmetry(vec, group)
        else:
            label, score = "unclassified", 0.0
        reports.append(ModeReport(lam, -2.0 * lam.imag, label, score, vec))
    return reports


def common_channel(gamma_common, n_sites):
    amp = math.sqrt(gamma_common)
    return DecayChannel(ChannelKind.COMMON, (amp,) * n_sites)

def individual_channels(gamma_individual, n_sites):
    amp = math.sqrt(gamma_individual)
    out = []
    for i in range(n_sites):
        w = [0.0] * n_sites
        w[i] = amp
        out.append(DecayChannel(ChannelKind.INDIVIDUAL, tuple(w)))
    return out


def triangle_network(side_s, shift_b, T0, kappa, gamma_common, gamma_individual,
                     site_energy=DEFAULT_SITE_ENERGY):
    """Three disks at the vertices of an equilateral triangle of side side_s
    (centre distances, units of D), with site 3 displaced by shift_b along
    its bisectrix; positive shift_b moves it outward, negative toward the
    centroid. One common channel plus three individual channels.
    """
    if side_s <= 1.0:
        raise GeometryError("triangle side must exceed one diameter")
    half = 0.5 * side_s
    apex_y = side_s * math.sqrt(3.0) / 2.0
    positions = [(-half, 0.0), (half, 0.0), (0.0, apex_y + shift_b)]
    channels = [common_channel(gamma_common, 3)] + individual_channels(gamma_individual, 3)
    network = SiteNetwork(
        site_energies=(site_energy,) * 3,
        channels=tuple(channels),
        positions=tuple(positions),
        coupling_rule=CouplingRule(T0=T0, kappa=kappa),
    )
    network.coupling_matrix()  # validate overlap eagerly
    return network


def _mirror_symmetric_share(vector):
    """Norm^2 fraction of the vector symmetric under swapping sites 1 and 2."""
    v = np.asarray(vector, dtype=complex)
    swapped = v[[1, 0, 2]]
    sym = 0.5 * (v + swapped)
    return float(np.vdot(sym, sym).real / np.vdot(v, v).real)


def identify_triplet(reports):
    """(bright, sharp, mid) roles of a 3-site spectrum.

    bright is the widest (superradiant) mode. Of the two dark modes, the one
    antisymmetric under the surviving site-1/2 mirror is exactly decoupled
    from a bisectrix perturbation (its width never moves); it is reported as
    'mid'. 'sharp' is the mirror-symmetric dark mode, the one whose
    stability is actually degraded by the symmetry breaking, matching the
    sharp component observed at intermediate frequency. Ties (the b = 0
    degenerate doublet) are broken by the mirror-symmetric share and then by
    ascending Re(eigenvalue).
    """
    if len(reports) != 3:
        raise DomainError("triplet identification needs exactly 3 modes")
    by_width = sorted(reports, key=lambda r: (-r.width, r.eigenvalue.real))
    bright = by_width[0]
    dark = by_width[1:]
    dark.sort(key=lambda r: (-_mirror_symmetric_share(r.vector), r.eigenvalue.real))
    sharp, mid = dark[0], dark[1]
    return bright, sharp, mid


def symmetry_break_sweep(side_s, b_values, T0, kappa, gamma_common,
                         gamma_individual, site_energy=DEFAULT_SITE_ENERGY,
                         freq_scale=9.45):
    """Track the sharp mode while site 3 slides toward the centroid.

    b is the inward displacement along the bisectrix (so the tunneling
    perturbation grows exponentially with b, the regime in which the sharp
    mode's Q degrades exponentially); triangle_network keeps its
    outward-positive convention, hence the sign flip. Returns a list of
    (b, row_dict or None); per-point geometry violations leave gaps.
    """
    b_values = list(b_values)
    if any(b < 0 for b in b_values):
        raise DomainError("b_values must be >= 0")
    if any(y <= x for x, y in zip(b_values, b_values[1:])):
        raise DomainError("b_values must be strictly increasing")
    rows = []
    for b in b_values:
        try:
            network = triangle_network(
                side_s, -b, T0, kappa, gamma_common, gamma_individual, site_energy
            )
        except GeometryError:
            rows.append((b, None))
            continue
        reports = spectrum(network)
        bright, sharp, mid = identify_triplet(reports)
        line = qm_to_em(sharp.eigenvalue, freq_scale)
        rows.append(
            (
                b,
                {
                    "sharp_width": sharp.width,
                    "sharp_Q": line.q_factor,
                    "sharp_irrep_score": sharp.irrep_score,
                    "sharp_irrep": sharp.irrep_label,
                    "bright_width": bright.width,
                    "mid_width": mid.width,
                },
            )
        )
    return rows


def dark_mode_width_oracle(side_s, b, T0, kappa, gamma_common, gamma_individual):
    """Second-order perturbation theory for the sharp mode's excess width.

    The inward shift changes T13 = T23 by delta relative to T12; mixing of
    the mirror-symmetric dark mode with the bright site-symmetric mode
    through the common channel gives an excess width
    (2/3) delta^2 gamma_c / (9 T^2 + (3 gamma_c / 2)^2), exact to O(delta^2)
    and proportional to b^2 for small b.
    """
    rule = CouplingRule(T0=T0, kappa=kappa)
    t12 = rule.coupling(side_s)
    half = 0.5 * side_s
    apex = side_s * math.sqrt(3.0) / 2.0
    d13 = math.hypot(half, apex - b)
    t13 = rule.coupling(d13)
    delta = abs(t13 - t12)
    t = abs(t12)
    denom = 9.0 * t * t + 2.25 * gamma_common * gamma_common
    return (2.0 / 3.0) * delta * delta * gamma_common / denom
