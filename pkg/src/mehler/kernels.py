"""Closed-form heat kernels of L_S = -div(A grad) + <Bx, x> and of its
lower-order extension L.

Kernel values are complex: the amplitude (det psi(t sqrt D) / det A)^(1/2)
becomes imaginary once an odd number of sin(t sqrt(-lambda)) factors are
negative.  All kernels accept ``x`` with shape (n,) or (..., n) and return a
scalar or an array over the leading axes.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NonCommuting, SingularCos, SingularD, SingularTime
from .spectral import (
    SINGULAR_GUARD,
    BranchFunction,
    OperatorSpec,
    branch_values,
    check_regular,
    check_spd,
    commutator_norm,
    matrix_function,
    spectral_from_symmetric,
)

DIAGONAL_TOL = 1e-14
SINGULAR_D_RTOL = 1e-10


def _quad(M, x, y):
    """<M x, y> batched over leading axes."""
    return np.einsum("...i,ij,...j->...", y, M, x)


def _squeeze(val, x=None):
    return val[()] if isinstance(val, np.ndarray) and val.ndim == 0 else val


def _amplitude(n, t, det_psi, det_A):
    return (4.0 * math.pi * t) ** (-0.5 * n) * np.sqrt(complex(det_psi / det_A))


def _as_points(x, n):
    x = np.asarray(x, dtype=float)
    if n == 1 and x.ndim == 0:
        x = x.reshape(1)
    if x.shape[-1] != n:
        raise DomainError(f"points must have trailing dimension {n}, got shape {x.shape}")
    return x


def ls_parts(spec: OperatorSpec, t):
    """Amplitude and the A^{-1}-weighted phi, psi matrices at time t."""
    S = spec.spectral
    check_regular(S, t)
    psi_vals = branch_values(S, BranchFunction.PSI, t)
    phi_m = spec.A_inv @ matrix_function(S, BranchFunction.PHI, t)
    psi_m = spec.A_inv @ ((S.Q * psi_vals) @ S.Q.T)
    amp = _amplitude(spec.n, t, float(np.prod(psi_vals)), spec.det_A)
    return amp, phi_m, psi_m


def kernel_LS(spec: OperatorSpec, x, x0, t):
    """Heat kernel of -div(A grad) + <Bx, x> for commuting A, B.

    K = (4 pi t)^(-n/2) (det psi(t sqrt D) / det A)^(1/2)
        exp(-(1/4t)(<phi x, x> + <phi x0, x0> - 2 <psi x, x0>)_{A^-1})

    with phi(u) = u coth u, psi(u) = u / sinh u and the principal square root.
    """
    if spec.has_lower_order:
        raise DomainError("kernel_LS requires f = g = 0 and h = 0; use kernel_L")
    x = _as_points(x, spec.n)
    x0 = _as_points(x0, spec.n)
    amp, phi_m, psi_m = ls_parts(spec, t)
    expo = -(_quad(phi_m, x, x) + _quad(phi_m, x0, x0) - 2.0 * _quad(psi_m, x, x0)) / (4.0 * t)
    return _squeeze(amp * np.exp(expo), x)


def is_diagonal(M) -> bool:
    M = np.asarray(M, dtype=float)
    off = M - np.diag(np.diag(M))
    return float(np.linalg.norm(off)) < DIAGONAL_TOL


def kernel_LS_diag(a, b_signed, x, x0, t):
    """Product-form kernel for A = diag(a_j^2), B = diag(b_signed_j).

    ``a`` holds a_j > 0 and ``b_signed`` holds +b_j^2 (hyperbolic coordinate),
    -b_j^2 (trigonometric coordinate) or 0.  Coordinate j contributes
        (2t b_j / (a_j sinh(2t a_j b_j)))^(1/2)
        exp(-(1/4t)(2t b_j / a_j) coth(2t a_j b_j)(x_j^2 + x0_j^2)
            + (1/2t)(2t b_j / a_j) x_j x0_j / sinh(2t a_j b_j))
    with sin, cot in place of sinh, coth for trigonometric coordinates.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    bs = np.atleast_1d(np.asarray(b_signed, dtype=float))
    n = a.size
    if bs.shape != (n,) or np.any(a <= 0.0):
        raise DomainError("a must be positive and match b_signed in length")
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t}")
    x = _as_points(x, n)
    x0 = _as_points(x0, n)
    value = (4.0 * math.pi * t) ** (-0.5 * n) + 0j
    expo = 0.0
    for j in range(n):
        aj = a[j]
        xj = x[..., j]
        x0j = x0[..., j]
        if bs[j] > 0.0:
            bj = math.sqrt(bs[j])
            u = 2.0 * t * aj * bj
            w = 2.0 * t * bj / aj
            amp2 = w / math.sinh(u)
            diag_w = w * math.cosh(u) / math.sinh(u)
            cross_w = w / math.sinh(u)
        elif bs[j] < 0.0:
            bj = math.sqrt(-bs[j])
            u = 2.0 * t * aj * bj
            k = round(u / math.pi)
            if k >= 1 and abs(t - k * math.pi / (2.0 * aj * bj)) < SINGULAR_GUARD:
                raise SingularTime(t, index=j, k=k)
            w = 2.0 * t * bj / aj
            amp2 = w / math.sin(u)
            diag_w = w * math.cos(u) / math.sin(u)
            cross_w = w / math.sin(u)
        else:
            amp2 = 1.0 / aj**2
            diag_w = cross_w = 1.0 / aj**2
        value = value * np.sqrt(complex(amp2))
        expo = expo - diag_w * (xj**2 + x0j**2) / (4.0 * t) + cross_w * xj * x0j / (2.0 * t)
    return _squeeze(value * np.exp(expo), x)


def kernel_auto(spec: OperatorSpec, x, x0, t):
    """Dispatch to the product form when A and B are exactly diagonal."""
    if not spec.has_lower_order and is_diagonal(spec.A) and is_diagonal(spec.B):
        return kernel_LS_diag(np.sqrt(np.diag(spec.A)), np.diag(spec.B), x, x0, t)
    if spec.has_lower_order:
        return kernel_L(spec, x, x0, t)
    return kernel_LS(spec, x, x0, t)


def check_invertible_D(spec: OperatorSpec):
    lam = spec.spectral.eigenvalues
    scale = spec.spectral.norm
    if np.any(np.abs(lam) <= SINGULAR_D_RTOL * scale):
        raise SingularD("D = 2A(B + B^t) is singular; closed form needs its inverse")


def lower_order_parts(spec: OperatorSpec, t):
    """Matrices coth(t sqrt D)/sqrt D, 1/(sqrt D sinh(t sqrt D)) and the scalar
    exponent -(|f|^2_{A^-1}/4 + h) t + t^3 <phi_W(t sqrt D) g, g>_A."""
    S = spec.spectral
    f, g = spec.f, spec.g
    n = spec.n
    if not (np.any(f) or np.any(g)):
        return np.zeros((n, n)), np.zeros((n, n)), -spec.h * t
    check_invertible_D(spec)
    C = matrix_function(S, BranchFunction.COTH_OVER_ROOT, t)
    N = matrix_function(S, BranchFunction.INV_ROOT_SINH, t)
    Wm = matrix_function(S, BranchFunction.PHI_W, t)
    scalar = -(0.25 * f @ spec.A_inv @ f + spec.h) * t + g @ spec.A @ Wm @ g
    return C, N, float(scalar)


def kernel_L(spec: OperatorSpec, x, x0, t):
    """Heat kernel of L = -div(A grad) + <Bx, x> + <f, grad> + <g, x> + h.

    The L_S kernel times
        exp(-(|f|^2_{A^-1}/4 + h) t + t^3 <phi_W(t sqrt D) g, g>_A)
        exp(<f, x>_{A^-1}/2 - <coth(t sqrt D)/sqrt D g, x>
            + <(sqrt D sinh(t sqrt D))^{-1} g, x0>)
    with phi_W(u) = (u - coth u)/u^3.  Needs D invertible when f or g is nonzero.
    """
    x = _as_points(x, spec.n)
    x0 = _as_points(x0, spec.n)
    amp, phi_m, psi_m = ls_parts(spec, t)
    C, N, scalar = lower_order_parts(spec, t)
    expo = -(_quad(phi_m, x, x) + _quad(phi_m, x0, x0) - 2.0 * _quad(psi_m, x, x0)) / (4.0 * t)
    lin = 0.5 * x @ (spec.A_inv @ spec.f) - x @ (C @ spec.g) + x0 @ (N @ spec.g)
    return _squeeze(amp * np.exp(expo + lin + scalar), x)


def kernel_gaussian(A, x, x0, t):
    """(4 pi t)^(-n/2) (det A)^(-1/2) exp(-|x - x0|^2_{A^-1} / 4t)."""
    A = check_spd(A)
    n = A.shape[0]
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t}")
    x = _as_points(x, n)
    x0 = _as_points(x0, n)
    d = x - x0
    Ainv = np.linalg.inv(A)
    q = np.einsum("...i,ij,...j->...", d, Ainv, d)
    val = (4.0 * math.pi * t) ** (-0.5 * n) / math.sqrt(np.linalg.det(A)) * np.exp(-q / (4.0 * t))
    return _squeeze(val, x)


def kernel_mehler(a, b, x, x0, t):
    """Mehler kernel of -div(A grad) + <Bx, x>, A = diag(a^2), B = diag(b^2), a, b > 0."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape or np.any(a <= 0.0) or np.any(b <= 0.0):
        raise DomainError("a and b must be positive vectors of equal length")
    n = a.size
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t}")
    x = _as_points(x, n)
    x0 = _as_points(x0, n)
    u = 2.0 * t * a * b
    w = 2.0 * t * b / a
    amp = (4.0 * math.pi * t) ** (-0.5 * n) * math.sqrt(float(np.prod(w / np.sinh(u))))
    expo = -np.sum(w * np.cosh(u) / np.sinh(u) * (x**2 + x0**2), axis=-1) / (4.0 * t)
    expo = expo + np.sum(w / np.sinh(u) * x * x0, axis=-1) / (2.0 * t)
    return _squeeze(amp * np.exp(expo), x)


def ou_weight(A, B, x):
    """Potential phi(x) = <Bx, x>_{A^-1} / 2 of the weighted space L^2(e^{-phi} dx)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    x = _as_points(x, A.shape[0])
    return _squeeze(0.5 * np.einsum("...i,ij,...j->...", x, np.linalg.inv(A) @ B, x), x)


def kernel_ou(A, B, x, x0, t):
    """Kernel of H = -div(A grad) + Bx . grad on L^2(e^{-<Bx,x>_{A^-1}/2} dx).

    With D' = B^t B,
    K = (4 pi t)^(-n/2) (det psi(t sqrt D') / det A e^{t tr B})^(1/2)
        exp(-(1/4t)(<[phi - tB] x, x> + <[phi - tB] x0, x0> - 2 <psi x, x0>)_{A^-1}).
    ``B`` must be symmetric and commute with ``A``.
    """
    A = check_spd(A)
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n = A.shape[0]
    if B.shape != (n, n):
        raise DomainError(f"B has shape {B.shape}, expected {(n, n)}")
    comm = commutator_norm(A, B)
    if comm > 1e-10 * np.linalg.norm(A) * max(np.linalg.norm(B), 1e-300):
        raise NonCommuting("B must commute with A")
    if np.linalg.norm(B - B.T) > 1e-12 * max(np.linalg.norm(B), 1e-300):
        raise NonCommuting("A^{-1}B must be symmetric, i.e. B symmetric")
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t}")
    x = _as_points(x, n)
    x0 = _as_points(x0, n)
    S = spectral_from_symmetric(B.T @ B)
    Ainv = np.linalg.inv(A)
    psi_vals = branch_values(S, BranchFunction.PSI, t)
    phi_m = Ainv @ (matrix_function(S, BranchFunction.PHI, t) - t * B)
    psi_m = Ainv @ ((S.Q * psi_vals) @ S.Q.T)
    amp = (4.0 * math.pi * t) ** (-0.5 * n) * math.sqrt(
        float(np.prod(psi_vals)) / float(np.linalg.det(A)) * math.exp(t * np.trace(B))
    )
    expo = -(_quad(phi_m, x, x) + _quad(phi_m, x0, x0) - 2.0 * _quad(psi_m, x, x0)) / (4.0 * t)
    return _squeeze(amp * np.exp(expo), x)


def _real_if_possible(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else z


def fourier_closed_form(a, b_signed, xi, t):
    """Fourier transform int K(x; t) e^{-2 pi i xi.x} dx of the kernel from the origin.

    Product over coordinates of (sech u_j)^(1/2) exp(-2 pi^2 (a_j/b_j) tanh(u_j) xi_j^2),
    u_j = 2t a_j b_j, with sec/tan for trigonometric coordinates and the
    limit exp(-4 pi^2 t a_j^2 xi_j^2) when b_j = 0.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    bs = np.atleast_1d(np.asarray(b_signed, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    n = a.size
    if bs.shape != (n,) or xi.shape != (n,) or np.any(a <= 0.0):
        raise DomainError("a, b_signed and xi must be vectors of equal length, a > 0")
    t = float(t)
    if not t > 0.0:
        raise DomainError(f"time must be positive, got {t}")
    value = 1.0 + 0j
    for j in range(n):
        aj = a[j]
        if bs[j] > 0.0:
            bj = math.sqrt(bs[j])
            u = 2.0 * t * aj * bj
            value *= np.sqrt(complex(1.0 / math.cosh(u)))
            value *= math.exp(-2.0 * math.pi**2 * (aj / bj) * math.tanh(u) * xi[j] ** 2)
        elif bs[j] < 0.0:
            bj = math.sqrt(-bs[j])
            u = 2.0 * t * aj * bj
            k = round(u / math.pi - 0.5)
            t_zero = (k + 0.5) * math.pi / (2.0 * aj * bj)
            if k >= 0 and abs(t - t_zero) < SINGULAR_GUARD:
                raise SingularCos(f"cos(2 t a b) vanishes at t={t} (coordinate {j})")
            value *= np.sqrt(complex(1.0 / math.cos(u)))
            value *= math.exp(-2.0 * math.pi**2 * (aj / bj) * math.tan(u) * xi[j] ** 2)
        else:
            value *= math.exp(-4.0 * math.pi**2 * t * aj**2 * xi[j] ** 2)
    return _real_if_possible(value)


def normalization_integral(a, b_signed, t):
    """int K(x; t) dx = prod sech(2t a_j b_j)^(1/2) prod sec(2t a_j b_j)^(1/2)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    return fourier_closed_form(a, b_signed, np.zeros(a.size), t)
