"""Factored backend for x/p-decoupled Gaussian states.

Every covariance matrix in this package has exactly zero x-p cross blocks, so
it splits into sectors X and P.  This module carries the factors
X = Fx Fx^T and P = Fp Fp^T instead of the matrices themselves: sources start
from exact factors, circuit elements act multiplicatively, channel noise
appends columns and homodyne conditioning is an orthogonal (Householder)
downdate.  No step subtracts large numbers, so the symplectic spectrum
(the singular values of Fp^T Fx) keeps absolute accuracy ~eps * lambda_max
even when matrix entries reach ~1e6 under strong modulation.  The dense
engine in `gaussian` loses the eigenvalues near 1 to cancellation there,
which is fatal for complement-entropy (purification) computations.

Internal module: the public API and its contracts live in `gaussian`; tests
pin the equivalence of the two engines on moderate parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeasurementError, DomainError
from .gaussian import SymplecticSpectrum, _clamped, bosonic_entropy_g


@dataclass(frozen=True)
class SplitState:
    """X = fx fx^T, P = fp fp^T; one row per mode in each factor."""

    fx: np.ndarray
    fp: np.ndarray

    @property
    def modes(self) -> int:
        return self.fx.shape[0]


def vacuum(n: int) -> SplitState:
    return SplitState(np.eye(n), np.eye(n))


def squeezed_vacuum(v_x: float) -> SplitState:
    if v_x <= 0:
        raise DomainError(f"squeezed quadrature variance must be > 0, got {v_x}")
    r = math.sqrt(v_x)
    return SplitState(np.array([[r]]), np.array([[1.0 / r]]))


def epr_source(v: float) -> SplitState:
    """Exact factors from the two-mode squeezing symplectic."""
    if v < 1.0:
        raise DomainError(f"EPR variance must be >= 1, got {v}")
    ch = math.sqrt((v + 1.0) / 2.0)
    sh = math.sqrt((v - 1.0) / 2.0)
    return SplitState(np.array([[ch, sh], [sh, ch]]),
                      np.array([[ch, -sh], [-sh, ch]]))


def tensor(a: SplitState, b: SplitState) -> SplitState:
    na, nb = a.modes, b.modes
    fx = np.zeros((na + nb, a.fx.shape[1] + b.fx.shape[1]))
    fp = np.zeros((na + nb, a.fp.shape[1] + b.fp.shape[1]))
    fx[:na, :a.fx.shape[1]] = a.fx
    fx[na:, a.fx.shape[1]:] = b.fx
    fp[:na, :a.fp.shape[1]] = a.fp
    fp[na:, a.fp.shape[1]:] = b.fp
    return SplitState(fx, fp)


def apply_sectors(state: SplitState, sx: np.ndarray, sp: np.ndarray) -> SplitState:
    """Apply a symplectic with x-sector sx and p-sector sp (sp^T = sx^{-1})."""
    return SplitState(sx @ state.fx, sp @ state.fp)


def apply_beamsplitter(state: SplitState, mode_a: int, mode_b: int, t: float) -> SplitState:
    s = np.eye(state.modes)
    rt, rr = math.sqrt(t), math.sqrt(1.0 - t)
    s[mode_a, mode_a] = rt
    s[mode_a, mode_b] = rr
    s[mode_b, mode_b] = rt
    s[mode_b, mode_a] = -rr
    return apply_sectors(state, s, s)


def apply_qnd_x_writer(state: SplitState, sig: int, rec: int, gain: float) -> SplitState:
    """x_sig += gain x_rec; p_rec -= gain p_sig."""
    sx = np.eye(state.modes)
    sp = np.eye(state.modes)
    sx[sig, rec] = gain
    sp[rec, sig] = -gain
    return apply_sectors(state, sx, sp)


def apply_qnd_p_writer(state: SplitState, sig: int, rec: int, gain: float) -> SplitState:
    """p_sig += gain p_rec; x_rec -= gain x_sig."""
    sx = np.eye(state.modes)
    sp = np.eye(state.modes)
    sp[sig, rec] = gain
    sx[rec, sig] = -gain
    return apply_sectors(state, sx, sp)


def apply_loss_channel(state: SplitState, mode: int, eta: float,
                       excess: float = 0.0) -> SplitState:
    """Scale the mode by sqrt(eta) and append a noise column of variance
    eta*excess + 1 - eta to each sector."""
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"channel transmittance must be in (0, 1], got {eta}")
    rt = math.sqrt(eta)
    noise = eta * excess + 1.0 - eta
    fx = np.array(state.fx)
    fp = np.array(state.fp)
    fx[mode, :] *= rt
    fp[mode, :] *= rt
    if noise > 0.0:
        col = np.zeros((state.modes, 1))
        col[mode, 0] = math.sqrt(noise)
        fx = np.hstack([fx, col])
        fp = np.hstack([fp, col])
    return SplitState(fx, fp)


def _householder_downdate(f, row):
    """Factor of F (I - w w^T / |w|^2) F^T with w = F[row], via one reflection."""
    w = f[row, :]
    norm = float(np.linalg.norm(w))
    if norm <= 0.0:
        raise DegenerateMeasurementError("measured quadrature variance must be > 0")
    u = w / norm
    u = np.array(u)
    u[0] += math.copysign(1.0, u[0] if u[0] != 0.0 else 1.0)
    u /= np.linalg.norm(u)
    reflected = f - 2.0 * np.outer(f @ u, u)
    return reflected[:, 1:]


def condition_on_homodyne(state: SplitState, mode: int, quadrature: str = "x") -> SplitState:
    """Measure one quadrature of a mode and remove the mode."""
    keep = [m for m in range(state.modes) if m != mode]
    if quadrature == "x":
        fx = _householder_downdate(state.fx, mode)[keep, :]
        fp = state.fp[keep, :]
    elif quadrature == "p":
        fp = _householder_downdate(state.fp, mode)[keep, :]
        fx = state.fx[keep, :]
    else:
        raise DomainError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    return SplitState(fx, fp)


def condition_on_heterodyne(state: SplitState, mode: int) -> SplitState:
    """Balanced-splitter x measurement; the second output stays (last mode)."""
    ext = tensor(state, vacuum(1))
    ext = apply_beamsplitter(ext, mode, ext.modes - 1, 0.5)
    return condition_on_homodyne(ext, mode, "x")


def partial_trace(state: SplitState, keep) -> SplitState:
    keep = list(keep)
    return SplitState(state.fx[keep, :], state.fp[keep, :])


def covariance(state: SplitState) -> np.ndarray:
    """Dense interleaved covariance matrix (for tests and inspection)."""
    n = state.modes
    gm = np.zeros((2 * n, 2 * n))
    gm[0::2, 0::2] = state.fx @ state.fx.T
    gm[1::2, 1::2] = state.fp @ state.fp.T
    return gm


def symplectic_eigenvalues(state: SplitState) -> SymplecticSpectrum:
    sv = np.linalg.svd(state.fp.T @ state.fx, compute_uv=False)
    return _clamped(sv[:state.modes].tolist())


def von_neumann_entropy(state: SplitState) -> float:
    spec = symplectic_eigenvalues(state)
    return sum(bosonic_entropy_g((lam - 1.0) / 2.0) for lam in spec.values)
