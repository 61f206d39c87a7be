"""Key-rate bounds for one-way Gaussian CV-QKD under collective attacks.

Protocol model
--------------
Alice prepares pure signal states with quadrature variances (V_S, 1/V_S)
(coherent states are V_S = 1) and applies independent Gaussian displacement
modulation of variance V_M to both quadratures; her key data is the x
displacement.  Trusted preparation noise of variance dV enters before the
untrusted channel (transmittance eta, input-referred excess noise eps),
trusted detection noise N after it, and Bob homodynes x.  The lower bound on
the key is K = beta * I_AB - chi, with chi the Holevo bound of the
eavesdropper against the reconciliation reference side (Alice for direct,
Bob for reverse reconciliation).

Two independent routes compute chi:

* ``purification``: all trusted-side modes are tracked and the eavesdropper's
  entropies are obtained as complement entropies of the trusted system.
  Trusted noise is purified by EPR pairs coupled to the signal on strongly
  unbalanced beam splitters (T -> 1); chi is evaluated at two transmittances
  and linearly extrapolated to T = 1.
* ``cloner``: the channel is dilated into an eavesdropper EPR pair of variance
  W = 1 + eta*eps/(1-eta) coupled at transmittance eta, Alice's modulation
  data ride along as classical variables, and the entropies are computed
  directly on the eavesdropper's modes.

Both are exact descriptions of the same protocol, so their agreement is a
strong correctness check; the analytic strong-modulation limits provide a
third, closed-form route.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import _splitcov as sc
from . import gaussian as g
from .errors import DomainError, NonConvergedError, UnsupportedModelError
from .gaussian import (
    ALICE, ANCILLA, BOB, CLASSICAL, EVE, SIGMA_Z,
    CovarianceMatrix, GaussianSystem, von_neumann_entropy,
)

COHERENT = "coherent"
SQUEEZED = "squeezed"
DR = "dr"
RR = "rr"

METHOD_PURIFICATION = "purification"
METHOD_CLONER = "cloner"
METHOD_ASYMPTOTIC = "asymptotic"
METHODS = (METHOD_PURIFICATION, METHOD_CLONER, METHOD_ASYMPTOTIC)

#: symbolic "arbitrarily strong modulation"; only asymptotic_key_rate accepts it
INFINITE = math.inf


@dataclass(frozen=True)
class ProtocolParams:
    """Trusted-station parameters of a protocol scenario (all variances in SNU)."""

    state_family: str = COHERENT
    v_s: float = 1.0          # signal x-quadrature variance, in (0, 1]
    v_m: float = 1.0          # modulation variance per quadrature; INFINITE allowed
    delta_v: float = 0.0      # trusted preparation excess noise
    n_det: float = 0.0        # trusted detection excess noise
    beta: float = 1.0         # reconciliation efficiency, in (0, 1]
    direction: str = RR

    def __post_init__(self):
        if self.state_family not in (COHERENT, SQUEEZED):
            raise DomainError(f"unknown state family {self.state_family!r}")
        if self.direction not in (DR, RR):
            raise DomainError(f"unknown direction {self.direction!r}")
        if not 0.0 < self.v_s <= 1.0:
            raise DomainError(f"V_S must be in (0, 1], got {self.v_s}")
        if self.state_family == COHERENT and self.v_s != 1.0:
            raise DomainError("coherent states require V_S = 1")
        if not self.v_m >= 0.0:
            raise DomainError(f"V_M must be >= 0, got {self.v_m}")
        if self.delta_v < 0.0 or self.n_det < 0.0:
            raise DomainError("trusted noise variances must be >= 0")
        if not 0.0 < self.beta <= 1.0:
            raise DomainError(f"beta must be in (0, 1], got {self.beta}")


@dataclass(frozen=True)
class ChannelParams:
    """Untrusted channel: transmittance and input-referred excess noise."""

    eta: float
    eps: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise DomainError(f"eta must be in (0, 1], got {self.eta}")
        if self.eps < 0.0:
            raise DomainError(f"eps must be >= 0, got {self.eps}")


@dataclass(frozen=True)
class PurificationConfig:
    """Coupling transmittances for the trusted-noise purification.

    chi is evaluated at t and t_check and extrapolated linearly in (1-t) to
    the lossless-coupling limit; |K(t) - K(t_check)| is the convergence
    diagnostic tested against tol_k.
    """

    t: float = 1.0 - 1e-7
    t_check: float = 1.0 - 1e-6
    tol_k: float = 1e-5

    def __post_init__(self):
        if not 0.0 < self.t_check < self.t < 1.0:
            raise DomainError("need 0 < t_check < t < 1")
        if self.tol_k <= 0.0:
            raise DomainError("tol_k must be > 0")


@dataclass(frozen=True)
class KeyRateReport:
    """Result of a key-rate evaluation, K = beta * I_AB - chi (bits/use)."""

    i_ab: float
    chi: float
    k: float
    method: str
    diagnostics: dict = field(default_factory=dict)


def mutual_information(p: ProtocolParams, c: ChannelParams) -> float:
    """Alice-Bob mutual information of the x-quadrature data, in bits."""
    if math.isinf(p.v_m):
        raise UnsupportedModelError("mutual information needs finite V_M")
    denom = c.eta * (p.v_s + c.eps + p.delta_v) + 1.0 - c.eta + p.n_det
    return 0.5 * math.log2(1.0 + c.eta * p.v_m / denom)


def build_pure_loss_eve(p: ProtocolParams, c: ChannelParams):
    """Eavesdropper matrices for the purely attenuating channel (eps = 0).

    Returns (gamma_E, sigma_AE, sigma_BE) for the single reflected mode held
    by the eavesdropper: gamma_E its covariance, sigma_AE the correlation with
    Alice's (x_M, p_M) modulation data, sigma_BE the correlation with Bob's
    mode.
    """
    if c.eps != 0.0:
        raise UnsupportedModelError("the beam-splitter eavesdropper model needs eps = 0")
    if math.isinf(p.v_m):
        raise UnsupportedModelError("needs finite V_M")
    eta = c.eta
    u = p.v_s + p.v_m + p.delta_v
    w = 1.0 / p.v_s + p.v_m + p.delta_v
    gamma_e = np.diag([(1.0 - eta) * u + eta, (1.0 - eta) * w + eta])
    sigma_ae = -math.sqrt(1.0 - eta) * p.v_m * np.eye(2)
    r = math.sqrt(eta * (1.0 - eta))
    sigma_be = np.diag([r * (1.0 - u), r * (1.0 - w)])
    return gamma_e, sigma_ae, sigma_be


# Mode indices of the six-mode purified system: the source pair (A, B), the
# preparation-noise pair (D, F) with D coupled to the signal before the
# channel, and the detection-noise pair (J, L) with J coupled after it.
A, B, D, F, J, L = range(6)


def _noise_variance(noise, t):
    return max(noise / (1.0 - t), 1.0)


def build_trusted_noise_purification(p: ProtocolParams, c: ChannelParams,
                                     cfg: PurificationConfig,
                                     t: float | None = None) -> GaussianSystem:
    """Six-mode covariance matrix of the purified trusted-noise scenario.

    Source: EPR pair of variance V_A = V_S + V_M (standard entangled-source
    scheme, so squeezed states must satisfy V_M = 1/V_S - V_S).  Trusted noise
    is injected by coupling one mode of an EPR pair of variance dV/(1-T)
    (resp. N/(1-T)) to the signal at transmittance T.  A zero-variance noise
    leaves its pair attached but uncoupled, keeping the mode count and
    ordering stable for any T.
    """
    if t is None:
        t = cfg.t
    if math.isinf(p.v_m):
        raise UnsupportedModelError("needs finite V_M")
    v_a = p.v_s + p.v_m
    if p.state_family == SQUEEZED:
        expected = 1.0 / p.v_s - p.v_s
        if abs(p.v_m - expected) > 1e-9 * max(1.0, expected):
            raise UnsupportedModelError(
                "standard entangled-source scheme needs V_M = 1/V_S - V_S for "
                f"squeezed states (V_S={p.v_s} implies V_M={expected}, got {p.v_m})")
    eta, eps = c.eta, c.eps

    # Per-coupling transmittance: 1 (no-op) when the corresponding noise is off.
    tp = t if p.delta_v > 0.0 else 1.0
    td = t if p.n_det > 0.0 else 1.0
    sp, sd = 1.0 - tp, 1.0 - td
    v_pn = _noise_variance(p.delta_v, t) if p.delta_v > 0.0 else 1.0
    v_dn = _noise_variance(p.n_det, t) if p.n_det > 0.0 else 1.0

    ca = math.sqrt(v_a * v_a - 1.0)
    cp = math.sqrt(v_pn * v_pn - 1.0)
    cd = math.sqrt(v_dn * v_dn - 1.0)
    v_b2 = eta * (tp * v_a + sp * v_pn + eps) + 1.0 - eta  # signal variance after channel

    c_ab = math.sqrt(td * eta * tp) * ca
    c_ad = -math.sqrt(sp) * ca
    c_aj = -math.sqrt(sd * eta * tp) * ca
    v_b = td * v_b2 + sd * v_dn
    c_bd = math.sqrt(td * eta * tp * sp) * (v_pn - v_a)
    c_bf = math.sqrt(td * eta * sp) * cp
    c_bj = math.sqrt(td * sd) * (v_dn - v_b2)
    c_bl = math.sqrt(sd) * cd
    v_d = tp * v_pn + sp * v_a
    c_df = math.sqrt(tp) * cp
    c_dj = -math.sqrt(sd * eta * tp * sp) * (v_pn - v_a)
    c_fj = -math.sqrt(sd * eta * sp) * cp
    v_j = td * v_dn + sd * v_b2
    c_jl = math.sqrt(td) * cd

    eye = np.eye(2)
    gm = np.zeros((12, 12))

    def put(i, j, blk):
        gm[2 * i:2 * i + 2, 2 * j:2 * j + 2] = blk
        if i != j:
            gm[2 * j:2 * j + 2, 2 * i:2 * i + 2] = blk.T

    put(A, A, v_a * eye)
    put(B, B, v_b * eye)
    put(D, D, v_d * eye)
    put(F, F, v_pn * eye)
    put(J, J, v_j * eye)
    put(L, L, v_dn * eye)
    put(A, B, c_ab * SIGMA_Z)
    put(A, D, c_ad * SIGMA_Z)
    put(A, J, c_aj * SIGMA_Z)
    put(B, D, c_bd * eye)
    put(B, F, c_bf * SIGMA_Z)
    put(B, J, c_bj * eye)
    put(B, L, c_bl * SIGMA_Z)
    put(D, F, c_df * SIGMA_Z)
    put(D, J, c_dj * eye)
    put(F, J, c_fj * SIGMA_Z)
    put(J, L, c_jl * SIGMA_Z)

    roles = (ALICE, BOB, ANCILLA, ANCILLA, ANCILLA, ANCILLA)
    return GaussianSystem(CovarianceMatrix(gm), roles)


def _qnd_x_writer(n_modes, sig, rec, gain):
    """QND sum gate x_sig += gain * x_rec, back-action p_rec -= gain * p_sig."""
    s = np.eye(2 * n_modes)
    s[2 * sig, 2 * rec] = gain
    s[2 * rec + 1, 2 * sig + 1] = -gain
    return s


def _qnd_p_writer(n_modes, sig, rec, gain):
    """QND sum gate p_sig += gain * p_rec, back-action x_rec -= gain * x_sig."""
    s = np.eye(2 * n_modes)
    s[2 * sig + 1, 2 * rec + 1] = gain
    s[2 * rec, 2 * sig] = -gain
    return s


def _trusted_side_factors(p: ProtocolParams, c: ChannelParams, t: float) -> sc.SplitState:
    """Trusted-side purification as a factored x/p-split state.

    Coherent states use the entangled-source circuit (EPR of variance
    V_A = 1 + V_M on modes [A, B]); squeezed states replace the source by a
    squeezed vacuum with two QND displacement writers (modes
    [x-record, p-record, B]), which realizes arbitrary (V_S, V_M).  In both
    cases the trusted-noise pairs [D, F] and [J, L] follow, D coupled to the
    signal before the channel and J after it, each at transmittance t;
    zero-variance noise leaves its pair uncoupled.  The x-record ancilla is
    squeezed to max(1, V_M) purely to keep factor entries at the ~V_M scale.

    The factored backend is used because complement entropies need the
    spectrum's near-1 eigenvalues, which dense eigensolvers lose to
    cancellation once entries reach ~V_M = 1e6.
    """
    if p.state_family == COHERENT:
        state = sc.epr_source(p.v_s + p.v_m)         # [A, B]
        sig = 1
    else:
        z1 = max(1.0, p.v_m)
        state = sc.tensor(sc.squeezed_vacuum(z1), sc.vacuum(1))
        state = sc.tensor(state, sc.squeezed_vacuum(p.v_s))   # [recx, recp, B]
        sig = 2
        if p.v_m > 0.0:
            state = sc.apply_qnd_p_writer(state, sig, 1, math.sqrt(p.v_m))
            state = sc.apply_qnd_x_writer(state, sig, 0, math.sqrt(p.v_m / z1))
    state = sc.tensor(state, sc.epr_source(_noise_variance(p.delta_v, t)))
    if p.delta_v > 0.0:
        state = sc.apply_beamsplitter(state, sig, sig + 1, t)
    state = sc.apply_loss_channel(state, sig, c.eta, c.eps)
    state = sc.tensor(state, sc.epr_source(_noise_variance(p.n_det, t)))
    if p.n_det > 0.0:
        state = sc.apply_beamsplitter(state, sig, sig + 3, t)
    return state


def build_entangling_cloner(p: ProtocolParams, c: ChannelParams,
                            cfg: PurificationConfig | None = None,
                            t: float | None = None) -> GaussianSystem:
    """Channel dilation with the eavesdropper's modes held explicitly.

    The eavesdropper keeps an EPR pair of variance W = 1 + eta*eps/(1-eta),
    one mode of which replaces the vacuum port of the channel beam splitter;
    W is fixed by the input-referred noise convention
    eta*(V + eps) + 1 - eta = eta*V + (1-eta)*W.  Alice's x/p modulation data
    are classical variables correlated with the signal; trusted noise couples
    through ancilla EPR pairs exactly as in the purification.  Mode order:
    [x_M, p_M, signal, E1, E2, D, F, J, L].
    """
    if cfg is None:
        cfg = PurificationConfig()
    if t is None:
        t = cfg.t
    if c.eta >= 1.0:
        raise UnsupportedModelError("the cloner dilation needs eta < 1")
    if math.isinf(p.v_m):
        raise UnsupportedModelError("needs finite V_M")
    w = 1.0 + c.eta * c.eps / (1.0 - c.eta)

    n0 = 3
    gm = np.eye(2 * n0)
    gm[4, 4] = p.v_s + p.v_m
    gm[5, 5] = 1.0 / p.v_s + p.v_m
    if p.v_m > 0.0:
        gm[0, 0] = gm[3, 3] = p.v_m   # x_M variance; p_M variance
        gm[0, 4] = gm[4, 0] = p.v_m   # <x_M x_sig>
        gm[3, 5] = gm[5, 3] = p.v_m   # <p_M p_sig>
    roles = [CLASSICAL, CLASSICAL, BOB] if p.v_m > 0.0 else [ANCILLA, ANCILLA, BOB]
    sys = GaussianSystem(CovarianceMatrix(gm), tuple(roles))
    sig = 2

    sys = g.tensor(sys, g.epr_source(w, (EVE, EVE)))                 # E1=3, E2=4
    sys = g.tensor(sys, g.epr_source(
        _noise_variance(p.delta_v, t), (ANCILLA, ANCILLA)))          # D=5, F=6
    sys = g.tensor(sys, g.epr_source(
        _noise_variance(p.n_det, t), (ANCILLA, ANCILLA)))            # J=7, L=8
    if p.delta_v > 0.0:
        sys = g.apply_beamsplitter(sys, sig, 5, t)
    sys = g.apply_beamsplitter(sys, sig, 3, c.eta)
    if p.n_det > 0.0:
        sys = g.apply_beamsplitter(sys, sig, 7, t)
    return sys


def _eve_entropy(sys):
    return von_neumann_entropy(g.partial_trace(sys, sys.modes_with_role(EVE)))


def _chi_at(p: ProtocolParams, c: ChannelParams, cfg: PurificationConfig,
            method: str, t: float) -> float:
    """Holevo bound at a fixed trusted-noise coupling transmittance."""
    if method == METHOD_PURIFICATION:
        state = _trusted_side_factors(p, c, t)
        if p.state_family == COHERENT:
            bob_mode, alice_mode = 1, 0
            heterodyne_alice = True
        else:
            bob_mode, alice_mode = 2, 0
            heterodyne_alice = False
        s_e = sc.von_neumann_entropy(state)
        if p.direction == RR:
            cond = sc.condition_on_homodyne(state, bob_mode, "x")
        elif heterodyne_alice:
            cond = sc.condition_on_heterodyne(state, alice_mode)
        else:
            cond = sc.condition_on_homodyne(state, alice_mode, "x")
        return s_e - sc.von_neumann_entropy(cond)

    if method == METHOD_CLONER:
        sys = build_entangling_cloner(p, c, cfg, t=t)
        s_e = _eve_entropy(sys)
        if p.direction == RR:
            cond = g.condition_on_homodyne(sys, 2, "x")
        else:
            xm = sys.modes_with_role(CLASSICAL)[:1]
            if not xm:  # no modulation, no reference data: nothing leaks about it
                return 0.0
            cond = g.condition_on_classical(sys, xm)
        return s_e - _eve_entropy(cond)

    raise DomainError(f"unknown Holevo method {method!r}")


def _chi_extrapolated(p, c, cfg, method):
    """chi extrapolated to lossless trusted-noise coupling.

    Returns (chi, delta) where delta = |chi(t) - chi(t_check)|, which equals
    |K(t) - K(t_check)| since I_AB carries no t dependence.  Without active
    couplings a single evaluation is exact and delta is 0.
    """
    if p.delta_v == 0.0 and p.n_det == 0.0:
        return _chi_at(p, c, cfg, method, cfg.t), 0.0
    chi1 = _chi_at(p, c, cfg, method, cfg.t)
    chi2 = _chi_at(p, c, cfg, method, cfg.t_check)
    s1, s2 = 1.0 - cfg.t, 1.0 - cfg.t_check
    chi = chi1 + (chi1 - chi2) * s1 / (s2 - s1)
    return chi, abs(chi1 - chi2)


def holevo_bound(p: ProtocolParams, c: ChannelParams,
                 cfg: PurificationConfig | None = None,
                 method: str = METHOD_PURIFICATION) -> float:
    """Upper bound on the eavesdropper's information about the reference data.

    Direct reconciliation conditions on Alice's x data (for coherent states
    through the balanced-splitter x measurement on the source mode, for
    squeezed states through the x measurement on the modulation record);
    reverse reconciliation conditions on Bob's x homodyne.
    """
    if cfg is None:
        cfg = PurificationConfig()
    chi, _ = _chi_extrapolated(p, c, cfg, method)
    return chi


def key_rate(p: ProtocolParams, c: ChannelParams,
             cfg: PurificationConfig | None = None,
             method: str = METHOD_PURIFICATION) -> KeyRateReport:
    """Lower bound K = beta * I_AB - chi on the secure key rate, bits/use.

    The purification and cloner methods evaluate chi at cfg.t and cfg.t_check;
    a difference above cfg.tol_k raises NonConvergedError carrying both key
    rates.  The asymptotic method reports the closed form with infinite I_AB
    and chi.
    """
    if cfg is None:
        cfg = PurificationConfig()
    if method == METHOD_ASYMPTOTIC:
        k = asymptotic_key_rate(p, c)
        return KeyRateReport(i_ab=math.inf, chi=math.inf, k=k, method=method,
                             diagnostics={"converged": True, "t_delta": 0.0,
                                          "clamp_warnings": 0})
    if method not in (METHOD_PURIFICATION, METHOD_CLONER):
        raise DomainError(f"unknown key-rate method {method!r}")
    i_ab = mutual_information(p, c)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", g.ClampWarning)
        chi, delta = _chi_extrapolated(p, c, cfg, method)
    clamps = sum(1 for w in caught if issubclass(w.category, g.ClampWarning))
    k = p.beta * i_ab - chi
    if delta > cfg.tol_k:
        raise NonConvergedError(
            f"purification limit not converged: |K(t) - K(t_check)| = {delta:.3e} "
            f"> tol_k = {cfg.tol_k:.3e}",
            k_at_t=k, k_at_t_check=k + delta)
    diagnostics = {"converged": True, "t_delta": delta, "clamp_warnings": clamps}
    return KeyRateReport(i_ab=i_ab, chi=chi, k=k, method=method,
                         diagnostics=diagnostics)


def asymptotic_key_rate(p: ProtocolParams, c: ChannelParams) -> float:
    """Closed-form key rate in the arbitrarily-strong-modulation limit.

    Valid for eps = 0, beta = 1 and symbolic V_M = INFINITE.  Reverse
    reconciliation admits preparation noise, direct reconciliation admits
    detection noise; the reciprocal combinations have no closed form here.
    """
    if not math.isinf(p.v_m):
        raise UnsupportedModelError("asymptotic form needs V_M = INFINITE")
    if c.eps != 0.0:
        raise UnsupportedModelError("asymptotic form needs eps = 0")
    if p.beta != 1.0:
        raise UnsupportedModelError(
            "beta < 1 with infinite modulation has no finite key rate")
    if c.eta >= 1.0:
        raise UnsupportedModelError("asymptotic form needs eta < 1")
    eta = c.eta
    if p.direction == RR:
        if p.n_det != 0.0:
            raise UnsupportedModelError("no closed form for detection noise in RR")
        return 0.5 * (math.log2(1.0 / (1.0 - eta))
                      - math.log2(eta * (p.v_s + p.delta_v) + 1.0 - eta))
    if p.delta_v != 0.0:
        raise UnsupportedModelError("no closed form for preparation noise in DR")
    return 0.5 * (math.log2(eta / (1.0 - eta))
                  - math.log2((p.v_s * eta + 1.0 - eta + p.n_det)
                              / (p.v_s * (1.0 - eta) + eta)))


@dataclass(frozen=True)
class NoiseThresholds:
    """Security-breaking bounds on trusted noise in the asymptotic regime."""

    which: str        # "delta_v" (RR) or "n" (DR)
    noise_max: float  # largest tolerable trusted noise at the given eta
    eta_min: float    # smallest transmittance tolerating the configured noise


def trusted_noise_thresholds(p: ProtocolParams, c: ChannelParams) -> NoiseThresholds:
    """Closed-form trusted-noise and transmittance bounds (eps = 0, beta = 1).

    RR: dV < (2 - eta)/(1 - eta) - V_S, inverted to
    eta > (dV + V_S - 2)/(dV + V_S - 1) (which is 1 - 1/dV for coherent states
    and 1 - 1/(dV - 1) in the strong-squeezing limit).
    DR: N < (2 eta - 1)/(1 - eta) independently of V_S, inverted to
    eta > 1 - 1/(N + 2).
    """
    if c.eps != 0.0:
        raise UnsupportedModelError("thresholds hold for eps = 0 only")
    eta = c.eta
    if p.direction == RR:
        noise_max = (2.0 - eta) / (1.0 - eta) - p.v_s
        tot = p.delta_v + p.v_s
        eta_min = (tot - 2.0) / (tot - 1.0) if tot > 2.0 else 0.0
        return NoiseThresholds(which="delta_v", noise_max=noise_max, eta_min=eta_min)
    noise_max = (2.0 * eta - 1.0) / (1.0 - eta)
    eta_min = 1.0 - 1.0 / (p.n_det + 2.0)
    return NoiseThresholds(which="n", noise_max=noise_max, eta_min=eta_min)


def with_params(p: ProtocolParams, **kw) -> ProtocolParams:
    """Functional update of protocol parameters (validated copy)."""
    return replace(p, **kw)
