"""Shared helpers: randomized physical states built from known-good pieces."""

import numpy as np
import pytest

from cvqkd import gaussian as g


def random_system(rng, n_modes, nu=None, ops=None, roles=None):
    """Random physical state S D S^T: symplectic S from beam splitters and
    squeezers applied to D = Diag(nu_i, nu_i), nu_i >= 1 (pure when nu = 1)."""
    if nu is None:
        nu = 1.0 + rng.exponential(1.0, n_modes)
    if roles is None:
        roles = (g.ANCILLA,) * n_modes
    if ops is None:
        ops = 3 * n_modes + 2
    diag = np.repeat(np.asarray(nu, dtype=float), 2)
    sys = g.GaussianSystem(g.CovarianceMatrix(np.diag(diag)), tuple(roles))
    for _ in range(ops):
        i = int(rng.integers(n_modes))
        sys = g.apply_squeezer(sys, i, float(rng.uniform(0.5, 2.0)))
        if n_modes > 1:
            j = int(rng.integers(n_modes - 1))
            j = j + 1 if j >= i else j
            sys = g.apply_beamsplitter(sys, i, j, float(rng.uniform(0.05, 0.95)))
    return sys


def random_pure_system(rng, n_modes, **kw):
    return random_system(rng, n_modes, nu=np.ones(n_modes), **kw)


def rotation_symplectic(n_modes, mode, theta):
    """Phase rotation, the one symplectic here that mixes x and p."""
    s = np.eye(2 * n_modes)
    c, sn = np.cos(theta), np.sin(theta)
    s[2 * mode, 2 * mode] = c
    s[2 * mode, 2 * mode + 1] = sn
    s[2 * mode + 1, 2 * mode] = -sn
    s[2 * mode + 1, 2 * mode + 1] = c
    return s


@pytest.fixture
def rng():
    return np.random.default_rng(20160120)
