"""Seeded random operator instances for property checks and verification suites."""

from __future__ import annotations

import math

import numpy as np

from .spectral import OperatorSpec

SIGNATURES = ("any", "hyperbolic", "trigonometric", "mixed")


def random_orthogonal(rng, n):
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def random_spd(rng, n, lo=0.5, hi=2.0):
    """Q diag(w) Q^t with log-uniform eigenvalues in [lo, hi]."""
    Q = random_orthogonal(rng, n)
    w = np.exp(rng.uniform(math.log(lo), math.log(hi), size=n))
    A = (Q * w) @ Q.T
    return 0.5 * (A + A.T)


def _signature_ok(lam, signature, min_abs):
    if np.any(np.abs(lam) < min_abs):
        return False
    if signature == "hyperbolic":
        return bool(np.all(lam > 0))
    if signature == "trigonometric":
        return bool(np.all(lam < 0))
    if signature == "mixed":
        return bool(np.any(lam > 0) and np.any(lam < 0))
    return True


def random_commuting_pair(rng, n, signature="any", min_abs=0.05, max_tries=10000):
    """A random SPD and B a polynomial in A with coefficients uniform in [-1, 1].

    Rejection sampling enforces the requested sign pattern of D = 2A(B + B^t)
    and keeps every eigenvalue at least ``min_abs`` away from zero.
    """
    if signature not in SIGNATURES:
        raise ValueError(f"unknown signature {signature!r}")
    if signature == "mixed" and n < 2:
        raise ValueError("mixed signature needs n >= 2")
    for _ in range(max_tries):
        A = random_spd(rng, n)
        w, Q = np.linalg.eigh(A)
        c = rng.uniform(-1.0, 1.0, size=n)
        pw = np.polynomial.polynomial.polyval(w, c)
        lam = 4.0 * w * pw
        if _signature_ok(lam, signature, min_abs):
            B = (Q * pw) @ Q.T
            # B = p(A) exactly in the eigenbasis of A; symmetrize rounding
            return A, 0.5 * (B + B.T)
    raise RuntimeError("could not draw an instance with the requested signature")


def regular_time(spec: OperatorSpec, t, margin=0.2) -> bool:
    """|sin(t sqrt(-lambda))| >= margin near every singular time k pi / sqrt(-lambda), k >= 1."""
    for lam in spec.spectral.eigenvalues:
        if lam >= -1e-12:
            continue
        kappa = math.sqrt(-lam)
        if round(t * kappa / math.pi) >= 1 and abs(math.sin(t * kappa)) < margin:
            return False
    return True


def random_time(rng, spec: OperatorSpec, lo=0.2, hi=1.0, margin=0.2, max_tries=1000):
    for _ in range(max_tries):
        t = float(rng.uniform(lo, hi))
        if regular_time(spec, t, margin):
            return t
    raise RuntimeError("no regular time found")


def random_spec(rng, n, signature="any", lower_order=False, times=(), margin=0.2, max_tries=1000):
    """Random OperatorSpec, optionally with f, g, h, regular at every time in ``times``."""
    for _ in range(max_tries):
        A, B = random_commuting_pair(rng, n, signature)
        if lower_order:
            f = rng.uniform(-1.0, 1.0, size=n)
            g = rng.uniform(-1.0, 1.0, size=n)
            h = float(rng.uniform(-1.0, 1.0))
            spec = OperatorSpec(A, B, f, g, h)
        else:
            spec = OperatorSpec(A, B)
        if all(regular_time(spec, t, margin) for t in times):
            return spec
    raise RuntimeError("no instance regular at the requested times")


def random_nonsymmetric_spec(rng, n, c=None):
    """A = c I with arbitrary (non-symmetric) B; commutation is automatic."""
    c = float(rng.uniform(0.5, 2.0)) if c is None else c
    B = rng.uniform(-1.0, 1.0, size=(n, n))
    return OperatorSpec(c * np.eye(n), B)
