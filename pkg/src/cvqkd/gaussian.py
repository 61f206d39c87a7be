"""Multimode Gaussian-state engine on covariance matrices.

Conventions, fixed for the whole package:

* Shot-noise units (SNU): the vacuum quadrature variance is 1, which pairs
  with the commutator [x, p] = 2i.  Half-unit conventions exist elsewhere;
  every variance here is in SNU.
* Quadrature ordering is interleaved, (x1, p1, x2, p2, ...), and the
  symplectic form Omega is built in that ordering.

All operations are pure functions on immutable values: inputs are never
mutated and covariance arrays are returned write-protected, so everything
here is safe to call concurrently from sweep workers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeasurementError, DomainError, PhysicalityError

LN2 = math.log(2.0)

SIGMA_Z = np.diag([1.0, -1.0])

# Symplectic-eigenvalue clamp bands: values in [1 - CLAMP_SILENT, 1) clamp to 1
# silently, values in [1 - CLAMP_WARN, 1 - CLAMP_SILENT) clamp with a warning,
# anything below 1 - CLAMP_WARN is a physicality error.
CLAMP_SILENT = 1e-9
CLAMP_WARN = 1e-6


class ClampWarning(UserWarning):
    """A marginally unphysical symplectic eigenvalue was clamped to 1."""


# Per-mode role tags.
ALICE = "alice"
BOB = "bob"
EVE = "eve"
ANCILLA = "ancilla"  # trusted ancilla (noise purifier, modulation record, ...)
CLASSICAL = "classical"  # jointly Gaussian classical variable, not a photonic mode

ROLES = (ALICE, BOB, EVE, ANCILLA, CLASSICAL)


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form for n modes in (x, p)-interleaved ordering."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def bosonic_entropy_g(x: float) -> float:
    """Entropy of a thermal mode with mean photon number x, in bits.

    G(x) = (x+1) log2(x+1) - x log2(x), continuous at 0 with G(0) = 0.
    Inputs in [-1e-12, 0] are treated as 0 (floating-point fuzz from
    eigenvalue computations); anything more negative is a domain error.
    """
    if x < -1e-12:
        raise DomainError(f"bosonic entropy argument must be >= 0, got {x}")
    if x <= 0.0:
        return 0.0
    return (x + 1.0) * math.log1p(x) / LN2 - x * math.log2(x)


@dataclass(frozen=True)
class CovarianceMatrix:
    """Real symmetric 2N x 2N quadrature second-moment matrix in SNU."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise DomainError(f"covariance matrix must be square 2Nx2N, got {arr.shape}")
        if arr.size and np.max(np.abs(arr - arr.T)) >= 1e-12 * max(1.0, np.max(np.abs(arr))):
            raise DomainError("covariance matrix is not symmetric")
        arr = 0.5 * (arr + arr.T)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def modes(self) -> int:
        return self.data.shape[0] // 2

    def block(self, i: int, j: int) -> np.ndarray:
        """2x2 block between modes i and j."""
        return self.data[2 * i:2 * i + 2, 2 * j:2 * j + 2]


@dataclass(frozen=True)
class GaussianSystem:
    """A covariance matrix plus per-mode role bookkeeping.

    Classical variables ride along as degenerate "modes": the variable sits in
    one quadrature slot and the other slot is an uncorrelated unit-variance
    dummy, so full-block Schur complements never mix in the placeholder.
    Classical modes are excluded from entropy and physicality computations.
    """

    cov: CovarianceMatrix
    roles: tuple[str, ...]

    def __post_init__(self):
        if len(self.roles) != self.cov.modes:
            raise DomainError(
                f"got {len(self.roles)} roles for {self.cov.modes} modes")
        for r in self.roles:
            if r not in ROLES:
                raise DomainError(f"unknown mode role {r!r}")
        object.__setattr__(self, "roles", tuple(self.roles))

    @property
    def modes(self) -> int:
        return self.cov.modes

    def modes_with_role(self, *roles: str) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.roles) if r in roles)


@dataclass(frozen=True)
class SymplecticSpectrum:
    """Symplectic eigenvalues, clamped to >= 1 and sorted descending."""

    values: tuple[float, ...]


def vacuum(n_modes: int, roles=None) -> GaussianSystem:
    """n uncorrelated vacuum modes."""
    if roles is None:
        roles = (ANCILLA,) * n_modes
    return GaussianSystem(CovarianceMatrix(np.eye(2 * n_modes)), tuple(roles))


def squeezed_vacuum(v_x: float, role: str = ALICE) -> GaussianSystem:
    """Single-mode pure state Diag(v_x, 1/v_x)."""
    if v_x <= 0:
        raise DomainError(f"squeezed quadrature variance must be > 0, got {v_x}")
    return GaussianSystem(CovarianceMatrix(np.diag([v_x, 1.0 / v_x])), (role,))


def epr_source(v: float, roles=(ALICE, BOB)) -> GaussianSystem:
    """Two-mode squeezed vacuum with quadrature variance v in each mode.

    Covariance matrix [[v I, sqrt(v^2-1) sigma_z], [sqrt(v^2-1) sigma_z, v I]];
    v = 1 gives two uncorrelated vacua.
    """
    if v < 1.0:
        raise DomainError(f"EPR variance must be >= 1, got {v}")
    c = math.sqrt(v * v - 1.0)
    g = np.zeros((4, 4))
    g[0:2, 0:2] = v * np.eye(2)
    g[2:4, 2:4] = v * np.eye(2)
    g[0:2, 2:4] = c * SIGMA_Z
    g[2:4, 0:2] = c * SIGMA_Z
    return GaussianSystem(CovarianceMatrix(g), tuple(roles))


def tensor(first: GaussianSystem, second: GaussianSystem) -> GaussianSystem:
    """Product state of two systems; modes of `second` are appended."""
    na, nb = 2 * first.modes, 2 * second.modes
    g = np.zeros((na + nb, na + nb))
    g[:na, :na] = first.cov.data
    g[na:, na:] = second.cov.data
    return GaussianSystem(CovarianceMatrix(g), first.roles + second.roles)


def apply_symplectic(sys: GaussianSystem, s: np.ndarray) -> GaussianSystem:
    """Congruence transform gamma -> S gamma S^T (roles unchanged)."""
    g = s @ sys.cov.data @ s.T
    return GaussianSystem(CovarianceMatrix(g), sys.roles)


def _check_mode(sys, mode):
    if not 0 <= mode < sys.modes:
        raise DomainError(f"mode index {mode} out of range for {sys.modes} modes")


def beamsplitter_symplectic(n_modes: int, mode_a: int, mode_b: int, t: float) -> np.ndarray:
    """Symplectic matrix for a -> sqrt(T) a + sqrt(1-T) b, b -> sqrt(T) b - sqrt(1-T) a."""
    s = np.eye(2 * n_modes)
    rt, rr = math.sqrt(t), math.sqrt(1.0 - t)
    ia, ib = slice(2 * mode_a, 2 * mode_a + 2), slice(2 * mode_b, 2 * mode_b + 2)
    s[ia, ia] = rt * np.eye(2)
    s[ia, ib] = rr * np.eye(2)
    s[ib, ib] = rt * np.eye(2)
    s[ib, ia] = -rr * np.eye(2)
    return s


def apply_beamsplitter(sys: GaussianSystem, mode_a: int, mode_b: int, t: float) -> GaussianSystem:
    """Couple two modes on a beam splitter of transmittance t in [0, 1]."""
    _check_mode(sys, mode_a)
    _check_mode(sys, mode_b)
    if mode_a == mode_b:
        raise DomainError("beam splitter needs two distinct modes")
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"transmittance must be in [0, 1], got {t}")
    return apply_symplectic(sys, beamsplitter_symplectic(sys.modes, mode_a, mode_b, t))


def apply_squeezer(sys: GaussianSystem, mode: int, s: float) -> GaussianSystem:
    """Single-mode squeezer x -> s x, p -> p / s."""
    _check_mode(sys, mode)
    if s <= 0:
        raise DomainError(f"squeezer scale must be > 0, got {s}")
    m = np.eye(2 * sys.modes)
    m[2 * mode, 2 * mode] = s
    m[2 * mode + 1, 2 * mode + 1] = 1.0 / s
    return apply_symplectic(sys, m)


def apply_loss_channel(sys: GaussianSystem, mode: int, eta: float,
                       excess: float = 0.0) -> GaussianSystem:
    """Phase-insensitive Gaussian channel on one mode.

    gamma_mm -> eta (gamma_mm + excess I) + (1 - eta) I, cross covariances
    scaled by sqrt(eta); `excess` is input-referred noise variance.
    """
    _check_mode(sys, mode)
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"channel transmittance must be in (0, 1], got {eta}")
    if excess < 0.0:
        raise DomainError(f"excess noise must be >= 0, got {excess}")
    g = np.array(sys.cov.data)
    i = slice(2 * mode, 2 * mode + 2)
    rt = math.sqrt(eta)
    g[i, :] *= rt
    g[:, i] *= rt
    g[i, i] += (eta * excess + 1.0 - eta) * np.eye(2)
    return GaussianSystem(CovarianceMatrix(g), sys.roles)


def partial_trace(sys: GaussianSystem, keep) -> GaussianSystem:
    """Reduce to the given modes (kept in the order given)."""
    keep = tuple(keep)
    for m in keep:
        _check_mode(sys, m)
    idx = [j for m in keep for j in (2 * m, 2 * m + 1)]
    g = sys.cov.data[np.ix_(idx, idx)]
    return GaussianSystem(CovarianceMatrix(g), tuple(sys.roles[m] for m in keep))


def _drop_mode(g, roles, mode):
    keep = [j for j in range(g.shape[0]) if j not in (2 * mode, 2 * mode + 1)]
    return g[np.ix_(keep, keep)], roles[:mode] + roles[mode + 1:], keep


def condition_on_homodyne(sys: GaussianSystem, mode: int,
                          quadrature: str = "x") -> GaussianSystem:
    """Condition the rest of the system on a homodyne measurement of one mode.

    Implements gamma_rest - sigma (Pi gamma_m Pi)^MP sigma^T; with Pi the
    projector on the measured quadrature the pseudo-inverse of Diag(v, 0) is
    Diag(1/v, 0), so only the measured row of sigma contributes.  The measured
    mode is removed from the returned system.
    """
    _check_mode(sys, mode)
    if quadrature not in ("x", "p"):
        raise DomainError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    g = sys.cov.data
    meas = 2 * mode + (0 if quadrature == "x" else 1)
    v = g[meas, meas]
    if v <= 0.0:
        raise DegenerateMeasurementError(
            f"measured quadrature variance must be > 0, got {v}")
    rest, roles, keep = _drop_mode(g, sys.roles, mode)
    sigma = g[keep, meas]
    return GaussianSystem(CovarianceMatrix(rest - np.outer(sigma, sigma) / v), roles)


def condition_on_heterodyne(sys: GaussianSystem, mode: int) -> GaussianSystem:
    """Condition on the x outcome of a heterodyne measurement of one mode.

    Composition: attach a vacuum ancilla, couple it to the measured mode on a
    balanced beam splitter, homodyne x on the measured-mode output.  The second
    splitter output (where p would be read) stays in the returned system as the
    last mode: its p-information must remain quantum-side for conditional
    entropies, which is what makes this reproduce the 4x4 conditional matrix
    of an EPR state measured heterodyne-style.
    """
    _check_mode(sys, mode)
    anc_role = sys.roles[mode]
    ext = tensor(sys, vacuum(1, (anc_role,)))
    ext = apply_beamsplitter(ext, mode, ext.modes - 1, 0.5)
    return condition_on_homodyne(ext, mode, "x")


def condition_on_classical(sys: GaussianSystem, variable_modes) -> GaussianSystem:
    """Condition on jointly Gaussian classical variables (Schur complement).

    The designated modes must carry the classical role; they are removed and
    gamma_rest - sigma gamma_cls^{-1} sigma^T is returned.
    """
    cls = tuple(variable_modes)
    if not cls:
        return sys
    for m in cls:
        _check_mode(sys, m)
        if sys.roles[m] != CLASSICAL:
            raise DomainError(f"mode {m} has role {sys.roles[m]!r}, not classical")
    g = sys.cov.data
    cidx = [j for m in cls for j in (2 * m, 2 * m + 1)]
    ridx = [j for j in range(g.shape[0]) if j not in cidx]
    gcls = g[np.ix_(cidx, cidx)]
    if np.linalg.eigvalsh(gcls).min() <= 1e-14 * max(1.0, np.abs(gcls).max()):
        raise DegenerateMeasurementError("classical block is singular")
    sigma = g[np.ix_(ridx, cidx)]
    rest = g[np.ix_(ridx, ridx)] - sigma @ np.linalg.solve(gcls, sigma.T)
    roles = tuple(r for m, r in enumerate(sys.roles) if m not in cls)
    return GaussianSystem(CovarianceMatrix(rest), roles)


def _clamped(values):
    """Clamp the band below 1 per the documented thresholds; error lower down."""
    out = []
    for lam in sorted(values, reverse=True):
        if lam < 1.0 - CLAMP_WARN:
            raise PhysicalityError(
                f"symplectic eigenvalue {lam!r} below physical bound 1", value=lam)
        if lam < 1.0 - CLAMP_SILENT:
            warnings.warn(
                f"clamped marginal symplectic eigenvalue {lam!r} to 1", ClampWarning,
                stacklevel=3)
            lam = 1.0
        elif lam < 1.0:
            lam = 1.0
        out.append(lam)
    return SymplecticSpectrum(tuple(out))


def _split_sectors(g):
    """(X, P) sectors if gamma has no x-p cross terms, else None.

    Every construction in this package (diagonal sources, sigma_z-correlated
    EPR pairs, beam splitters, squeezers, loss channels, the displacement
    writers, x/p conditioning) preserves exact zeros on the x-p cross slots,
    so the check is for exact zeros.
    """
    x = g[0::2, 0::2]
    p = g[1::2, 1::2]
    if np.any(g[0::2, 1::2]):
        return None
    return x, p


def two_mode_closed_form(cov: CovarianceMatrix):
    """Williamson closed form for two modes, as raw (unclamped) values.

    lambda_+/-^2 = (Delta +/- sqrt(Delta^2 - 4 det)) / 2 with
    Delta = det A + det B + 2 det C for the block form [[A, C], [C^T, B]];
    the smaller eigenvalue is recovered from det/lambda_+^2 to dodge the
    subtractive cancellation at large Delta.
    """
    g = cov.data
    a = float(np.linalg.det(g[0:2, 0:2]))
    b = float(np.linalg.det(g[2:4, 2:4]))
    c = float(np.linalg.det(g[0:2, 2:4]))
    det = float(np.linalg.det(g))
    delta = a + b + 2.0 * c
    disc = max(delta * delta - 4.0 * det, 0.0)
    hi = (delta + math.sqrt(disc)) / 2.0
    if hi <= 0.0 or det <= 0.0:
        raise PhysicalityError("2-mode matrix is not positive definite", value=det)
    return math.sqrt(hi), math.sqrt(det / hi)


def _split_svd_spectrum(x, p, n):
    try:
        gx = np.linalg.cholesky(x)
        gp = np.linalg.cholesky(p)
    except np.linalg.LinAlgError as exc:
        raise PhysicalityError("covariance matrix is not positive definite") from exc
    sv = np.linalg.svd(gx.T @ gp, compute_uv=False)
    return _clamped(sv[:n].tolist())


def symplectic_eigenvalues(cov: CovarianceMatrix) -> SymplecticSpectrum:
    """Symplectic spectrum of a physical covariance matrix.

    One-mode matrices use sqrt(det); two-mode matrices the Williamson closed
    form.  Matrices with decoupled x/p sectors (every construction in this
    package) instead use the singular values of chol(X)^T chol(P): that route
    is exact at spectral degeneracies, where the closed form's discriminant
    amplifies roundoff to sqrt(eps), and it keeps eigenvalues near 1 accurate
    even for matrix norms ~1e6 (strong modulation).  The general N > 2
    fallback is the Hermitian eigenproblem of i sqrt(gamma) Omega sqrt(gamma).
    """
    g = cov.data
    n = cov.modes
    if n == 1:
        det = float(np.linalg.det(g))
        if det <= 0 or g[0, 0] <= 0:
            raise PhysicalityError("1-mode matrix is not positive definite", value=det)
        return _clamped([math.sqrt(det)])
    sectors = _split_sectors(g)
    if sectors is not None:
        return _split_svd_spectrum(*sectors, n)
    if n == 2:
        return _clamped(list(two_mode_closed_form(cov)))
    w, q = np.linalg.eigh(g)
    if w.min() <= 0.0:
        raise PhysicalityError(
            "covariance matrix is not positive definite", value=float(w.min()))
    root = (q * np.sqrt(w)) @ q.T
    herm = 1j * (root @ omega(n) @ root)
    ev = np.linalg.eigvalsh(herm)
    return _clamped(ev[-n:].tolist())


def von_neumann_entropy(state) -> float:
    """Entropy of a Gaussian state, in bits: sum of G((lambda_i - 1)/2).

    Accepts a CovarianceMatrix or a GaussianSystem without classical modes.
    """
    if isinstance(state, GaussianSystem):
        if CLASSICAL in state.roles:
            raise DomainError("entropy of a system with classical modes is undefined")
        cov = state.cov
    else:
        cov = state
    spec = symplectic_eigenvalues(cov)
    return sum(bosonic_entropy_g((lam - 1.0) / 2.0) for lam in spec.values)
