"""Geodesics, conserved energy and action of the Hamiltonian system of L_S.

With H(x, xi) = -<A xi, xi> + <Bx, x> the x-component of the flow obeys
x'' = D x, D = 2A(B + B^t).  The boundary value problem x(0) = x0, x(t) = x1
is solved mode by mode in the eigenbasis of D; all scalar weights are then
folded back into matrix functions of D paired with A^{-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, OutOfRange, SingularShooting
from .spectral import (
    TRIG_THRESHOLD,
    BranchFunction,
    OperatorSpec,
    check_regular,
    matrix_function,
)

HYPERBOLIC = "hyperbolic"
TRIGONOMETRIC = "trigonometric"
FLAT = "flat"


def hamiltonian_value(spec: OperatorSpec, x, xi) -> float:
    """Full symbol -<A xi, xi> + <Bx, x>."""
    x = np.asarray(x, dtype=float).reshape(-1)
    xi = np.asarray(xi, dtype=float).reshape(-1)
    return float(-xi @ spec.A @ xi + x @ spec.B @ x)


@dataclass(frozen=True)
class BoundaryData:
    x0: np.ndarray
    x1: np.ndarray
    t: float

    def __post_init__(self):
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        x1 = np.atleast_1d(np.asarray(self.x1, dtype=float))
        if x0.shape != x1.shape or x0.ndim != 1:
            raise DomainError("x0 and x1 must be vectors of equal length")
        if not float(self.t) > 0.0:
            raise DomainError(f"t must be positive, got {self.t}")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class GeodesicSolution:
    """Closed-form geodesic in the eigenframe y = P x of D.

    For mode j the coordinate y_j(s) is
      hyperbolic:     coef_a[j] e^{r s} + coef_b[j] e^{-r s},   r = sqrt(lambda_j)
      trigonometric:  coef_a[j] cos(k s) + coef_b[j] sin(k s), k = sqrt(-lambda_j)
      flat:           coef_a[j] + coef_b[j] s
    """

    P: np.ndarray
    eigenvalues: np.ndarray
    modes: tuple
    coef_a: np.ndarray
    coef_b: np.ndarray
    boundary: BoundaryData

    @property
    def t(self) -> float:
        return self.boundary.t

    @property
    def n(self) -> int:
        return self.P.shape[0]


def _mode(lam):
    if lam > TRIG_THRESHOLD:
        return HYPERBOLIC
    if lam < -TRIG_THRESHOLD:
        return TRIGONOMETRIC
    return FLAT


def solve_geodesic(spec: OperatorSpec, bd: BoundaryData) -> GeodesicSolution:
    """Solve x'' = D x, x(0) = x0, x(t) = x1.

    Raises SingularTime when t = k pi / sqrt(-lambda) for a negative
    eigenvalue; there the boundary problem has no or infinitely many solutions.
    """
    S = spec.spectral
    if bd.x0.shape != (spec.n,):
        raise DomainError("boundary points have the wrong dimension")
    check_regular(S, bd.t)
    P = S.Q.T
    y0 = P @ bd.x0
    y1 = P @ bd.x1
    t = bd.t
    modes = []
    ca = np.empty(spec.n)
    cb = np.empty(spec.n)
    for j, lam in enumerate(S.eigenvalues):
        mode = _mode(lam)
        modes.append(mode)
        if mode == HYPERBOLIC:
            r = math.sqrt(lam)
            e1 = math.exp(r * t)
            den = math.expm1(2.0 * r * t)
            ca[j] = (e1 * y1[j] - y0[j]) / den
            cb[j] = (e1 * e1 * y0[j] - e1 * y1[j]) / den
        elif mode == TRIGONOMETRIC:
            k = math.sqrt(-lam)
            ca[j] = y0[j]
            cb[j] = (y1[j] - math.cos(k * t) * y0[j]) / math.sin(k * t)
        else:
            ca[j] = y0[j]
            cb[j] = (y1[j] - y0[j]) / t
    return GeodesicSolution(
        P=P,
        eigenvalues=S.eigenvalues.copy(),
        modes=tuple(modes),
        coef_a=ca,
        coef_b=cb,
        boundary=bd,
    )


def eval_geodesic(gs: GeodesicSolution, s):
    """Point(s) on the geodesic; ``s`` scalar gives shape (n,), array gives (m, n)."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    t = gs.t
    if np.any(s_arr < 0.0) or np.any(s_arr > t):
        raise OutOfRange(f"path parameter must lie in [0, {t}]")
    y0 = gs.P @ gs.boundary.x0
    y1 = gs.P @ gs.boundary.x1
    Y = np.empty((s_arr.size, gs.n))
    for j, mode in enumerate(gs.modes):
        lam = gs.eigenvalues[j]
        if mode == HYPERBOLIC:
            # sinh-ratio form of coef_a e^{rs} + coef_b e^{-rs}; no cancellation for small r t
            r = math.sqrt(lam)
            Y[:, j] = (y0[j] * np.sinh(r * (t - s_arr)) + y1[j] * np.sinh(r * s_arr)) / math.sinh(r * t)
        elif mode == TRIGONOMETRIC:
            k = math.sqrt(-lam)
            Y[:, j] = gs.coef_a[j] * np.cos(k * s_arr) + gs.coef_b[j] * np.sin(k * s_arr)
        else:
            Y[:, j] = gs.coef_a[j] + gs.coef_b[j] * s_arr
    X = Y @ gs.P
    return X[0] if np.ndim(s) == 0 else X


def eval_geodesic_velocity(gs: GeodesicSolution, s):
    """Analytic derivative d/ds of :func:`eval_geodesic`."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    t = gs.t
    if np.any(s_arr < 0.0) or np.any(s_arr > t):
        raise OutOfRange(f"path parameter must lie in [0, {t}]")
    y0 = gs.P @ gs.boundary.x0
    y1 = gs.P @ gs.boundary.x1
    V = np.empty((s_arr.size, gs.n))
    for j, mode in enumerate(gs.modes):
        lam = gs.eigenvalues[j]
        if mode == HYPERBOLIC:
            r = math.sqrt(lam)
            V[:, j] = r * (y1[j] * np.cosh(r * s_arr) - y0[j] * np.cosh(r * (t - s_arr))) / math.sinh(r * t)
        elif mode == TRIGONOMETRIC:
            k = math.sqrt(-lam)
            V[:, j] = k * (gs.coef_b[j] * np.cos(k * s_arr) - gs.coef_a[j] * np.sin(k * s_arr))
        else:
            V[:, j] = gs.coef_b[j]
    X = V @ gs.P
    return X[0] if np.ndim(s) == 0 else X


def eval_geodesic_basis(gs: GeodesicSolution, s):
    """Evaluate literally from the stored coefficient pairs (exponential basis)."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    Y = np.empty((s_arr.size, gs.n))
    for j, mode in enumerate(gs.modes):
        lam = gs.eigenvalues[j]
        if mode == HYPERBOLIC:
            r = math.sqrt(lam)
            Y[:, j] = gs.coef_a[j] * np.exp(r * s_arr) + gs.coef_b[j] * np.exp(-r * s_arr)
        elif mode == TRIGONOMETRIC:
            k = math.sqrt(-lam)
            Y[:, j] = gs.coef_a[j] * np.cos(k * s_arr) + gs.coef_b[j] * np.sin(k * s_arr)
        else:
            Y[:, j] = gs.coef_a[j] + gs.coef_b[j] * s_arr
    X = Y @ gs.P
    return X[0] if np.ndim(s) == 0 else X


def energy(spec: OperatorSpec, bd: BoundaryData) -> float:
    """Conserved value of (1/2)(<x', x'>_{A^-1} - <x'', x>_{A^-1}) along the geodesic.

    In matrix-function form
        E = 1/2 [<F1 x1, x1> + <F1 x0, x0> - 2 <F2 x1, x0>]_{A^-1}
    with F1 = D / sinh^2(t sqrt D) = psi^2 / t^2 and
    F2 = D cosh(t sqrt D) / sinh^2(t sqrt D) = phi psi / t^2.
    """
    S = spec.spectral
    check_regular(S, bd.t)
    t = bd.t
    phi = matrix_function(S, BranchFunction.PHI, t)
    psi = matrix_function(S, BranchFunction.PSI, t)
    F1 = spec.A_inv @ psi @ psi / t**2
    F2 = spec.A_inv @ phi @ psi / t**2
    x0, x1 = bd.x0, bd.x1
    return float(0.5 * (x1 @ F1 @ x1 + x0 @ F1 @ x0 - 2.0 * x1 @ F2 @ x0))


def action(spec: OperatorSpec, bd: BoundaryData) -> float:
    """Action S = -int E dt in closed form.

    S = (1/2t) [<phi x1, x1> + <phi x0, x0> - 2 <psi x1, x0>]_{A^-1},
    phi = u coth u and psi = u / sinh u applied to u = t sqrt(D).
    """
    S = spec.spectral
    check_regular(S, bd.t)
    t = bd.t
    phi = spec.A_inv @ matrix_function(S, BranchFunction.PHI, t)
    psi = spec.A_inv @ matrix_function(S, BranchFunction.PSI, t)
    x0, x1 = bd.x0, bd.x1
    return float((x1 @ phi @ x1 + x0 @ phi @ x0 - 2.0 * x1 @ psi @ x0) / (2.0 * t))


@dataclass(frozen=True)
class ShootingTrajectory:
    s: np.ndarray
    X: np.ndarray
    v0: np.ndarray
    conditioning: float


def _rk4_transition(D, t, steps):
    n = D.shape[0]
    M = np.zeros((2 * n, 2 * n))
    M[:n, n:] = np.eye(n)
    M[n:, :n] = D
    h = t / steps
    Z = np.eye(2 * n)
    history = np.empty((steps + 1, 2 * n, 2 * n))
    history[0] = Z
    for i in range(steps):
        k1 = M @ Z
        k2 = M @ (Z + 0.5 * h * k1)
        k3 = M @ (Z + 0.5 * h * k2)
        k4 = M @ (Z + h * k3)
        Z = Z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        history[i + 1] = Z
    return history


def shooting_oracle(spec: OperatorSpec, bd: BoundaryData, steps=2048, rcond=1e-3):
    """Independent RK4 shooting solution of x'' = D x with x(0)=x0, x(t)=x1.

    The 2n fundamental solutions are integrated with classical RK4; the
    initial velocity solves Phi_xv v = x1 - Phi_xx x0.  The endpoint map is
    rejected as singular when sigma_min(Phi_xv) / max(sigma_max(Phi_xv), t)
    falls below ``rcond``.
    """
    n = spec.n
    t = bd.t
    D = spec.spectral.D
    history = _rk4_transition(D, t, steps)
    Z = history[-1]
    Pxx = Z[:n, :n]
    Pxv = Z[:n, n:]
    sv = np.linalg.svd(Pxv, compute_uv=False)
    cond = sv[-1] / max(sv[0], t)
    if cond < rcond:
        raise SingularShooting(f"endpoint map near-singular at t={t} (ratio {cond:.2e})")
    v0 = np.linalg.solve(Pxv, bd.x1 - Pxx @ bd.x0)
    state = np.concatenate([bd.x0, v0])
    X = history[:, :n, :] @ state
    if np.linalg.norm(X[-1] - bd.x1) > 1e-8 * (1.0 + np.linalg.norm(bd.x1)):
        raise SingularShooting(f"endpoint miss {np.linalg.norm(X[-1] - bd.x1):.2e} at t={t}")
    s = np.linspace(0.0, t, steps + 1)
    return ShootingTrajectory(s=s, X=X, v0=v0, conditioning=float(cond))
