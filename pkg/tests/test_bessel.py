"""Bessel evaluator and zero locator against scipy.special."""

import numpy as np
import scipy.special as sp

from gsqg import bessel


def test_j0_matches_scipy_everywhere():
    x = np.concatenate([
        np.linspace(1e-9, 5.0, 20001),
        np.linspace(5.0, 60.0, 20001),
        np.logspace(1.8, 4.0, 2001),
    ])
    assert np.max(np.abs(bessel.j0(x) - sp.j0(x))) < 1e-12


def test_j1_and_derivative():
    x = np.linspace(-40.0, 40.0, 10001)
    assert np.max(np.abs(bessel.j1(x) - sp.j1(x))) < 1e-12
    assert np.max(np.abs(bessel.j0_prime(x) + sp.j1(x))) < 1e-12


def test_j0_scalar_and_negative_symmetry():
    assert bessel.j0(0.0) == 1.0
    assert abs(bessel.j0(-3.1) - sp.j0(3.1)) < 1e-14


def test_zeros_match_scipy():
    n = 400
    ours = bessel.j0_zeros(n)
    ref = sp.jn_zeros(0, n)
    assert np.max(np.abs(ours - ref) / ref) < 1e-12
    assert np.max(np.abs(sp.j0(ours))) < 1e-12
    assert np.all(np.diff(ours) > 3.0)
