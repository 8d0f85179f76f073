"""Independent numerical oracles bundled into named verification suites.

Every suite is a function ``suite(seed) -> VerificationReport``.  Checks use
finite differences, tanh-sinh quadrature or an RK4 shooting solver; none of
them reuse the closed form they are checking except as the quantity under test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import hamiltonics as ham
from . import kernels as ker
from .errors import SingularShooting, SingularTime
from .instances import (
    random_nonsymmetric_spec,
    random_spd,
    random_spec,
    random_time,
)
from .quadrature import integrate, integrate_2d, oracle_radius, peak_breaks
from .riccati import EQUATIONS, assemble_ansatz, coefficients, ode_residuals, rk4_propagate_alpha
from .spectral import OperatorSpec, singular_times


def _num(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [_num(e) for e in v.tolist()] if v.ndim else _num(v[()])
    if isinstance(v, (list, tuple)):
        return [_num(e) for e in v]
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    return v


@dataclass(frozen=True)
class ResidualSample:
    check: str
    location: dict
    residual: float
    scale: float
    tol: float

    @property
    def ratio(self) -> float:
        return self.residual / self.scale

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol * self.scale)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "location": {k: _num(v) for k, v in self.location.items()},
            "residual": float(self.residual),
            "scale": float(self.scale),
            "tol": float(self.tol),
            "pass": self.passed,
        }


@dataclass
class VerificationReport:
    suite: str
    seed: int | None = None
    samples: list = field(default_factory=list)

    def add(self, check, residual, scale, tol, **location):
        self.samples.append(ResidualSample(check, location, float(residual), float(scale), float(tol)))

    def extend(self, other: "VerificationReport"):
        self.samples.extend(other.samples)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.samples)

    @property
    def max_ratio(self) -> float:
        return max((s.ratio for s in self.samples), default=0.0)

    @property
    def median_ratio(self) -> float:
        return float(np.median([s.ratio for s in self.samples])) if self.samples else 0.0

    def failures(self) -> list:
        return [s for s in self.samples if not s.passed]

    def checks(self) -> dict:
        """Pass flag per check name."""
        out = {}
        for s in self.samples:
            out[s.check] = out.get(s.check, True) and s.passed
        return out

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "pass": self.passed,
            "n_samples": len(self.samples),
            "n_failed": len(self.failures()),
            "max_ratio": self.max_ratio,
            "median_ratio": self.median_ratio,
            "checks": self.checks(),
            "samples": [s.to_dict() for s in self.samples],
        }


# finite-difference stencils (fourth order)
D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
OFFSETS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])


def fd_time_derivative(fn, t, h):
    vals = [fn(t + o * h) for o in OFFSETS]
    return sum(c * v for c, v in zip(D1, vals)) / h


def fd_spatial(fn, x, h):
    """Gradient and Hessian of ``fn`` at ``x``; ``fn`` evaluates a batch of points.

    Mixed partials come from directional second differences along
    e_i + e_j and e_i - e_j.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    dirs = [np.eye(n)[i] for i in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for i, j in pairs:
        dirs.append(dirs[i] + dirs[j])
        dirs.append(dirs[i] - dirs[j])
    pts = np.array([x + o * h * d for d in dirs for o in OFFSETS])
    vals = np.asarray(fn(pts)).reshape(len(dirs), len(OFFSETS))
    grad = np.array([D1 @ vals[i] / h for i in range(n)])
    second = [D2 @ vals[k] / h**2 for k in range(len(dirs))]
    hess = np.zeros((n, n), dtype=vals.dtype)
    for i in range(n):
        hess[i, i] = second[i]
    for p, (i, j) in enumerate(pairs):
        hess[i, j] = hess[j, i] = 0.25 * (second[n + 2 * p] - second[n + 2 * p + 1])
    return grad, hess


def _kernel_for(spec: OperatorSpec, kind="auto"):
    if kind == "diag":
        a = np.sqrt(np.diag(spec.A))
        b = np.diag(spec.B)
        return lambda x, x0, t: ker.kernel_LS_diag(a, b, x, x0, t)
    if kind == "LS" or (kind == "auto" and not spec.has_lower_order):
        return lambda x, x0, t: ker.kernel_LS(spec, x, x0, t)
    return lambda x, x0, t: ker.kernel_L(spec, x, x0, t)


def pde_residual(spec: OperatorSpec, points, kind="auto", h=None, tol=1e-5, report=None):
    """Finite-difference residual of (d/dt + L) K at each (x, x0, t).

    Derivatives use fourth-order central stencils with spatial step
    ``h`` (default 2e-3 min(1, sqrt t)) and time step 1e-4 t.  Each residual
    is normalized by |K| (1 + |E|), E the geodesic energy from x0 to x.
    """
    report = report if report is not None else VerificationReport("pde")
    K = _kernel_for(spec, kind)
    A, B, f, g = spec.A, spec.B, spec.f, spec.g
    for x, x0, t in points:
        x = np.asarray(x, dtype=float)
        x0 = np.asarray(x0, dtype=float)
        hx = h if h is not None else 2e-3 * min(1.0, math.sqrt(t))
        k0 = complex(K(x, x0, t))
        kt = fd_time_derivative(lambda s: complex(K(x, x0, s)), t, 1e-4 * t)
        grad, hess = fd_spatial(lambda p: K(p, x0, t), x, hx)
        Lk = -np.sum(A * hess) + (x @ B @ x + g @ x + spec.h) * k0 + f @ grad
        E = ham.energy(spec, ham.BoundaryData(x0, x, t))
        report.add("pde", abs(kt + Lk), abs(k0) * (1.0 + abs(E)), tol, x=x, x0=x0, t=t)
    return report


def lemma_identities(spec: OperatorSpec, points, tol=1e-5, report=None):
    """Check the eikonal, Laplacian-trace and transport identities of the action.

    With S(x) the action from x0 to x over time t:
      |grad S|_A^2 = 4 <Bx, x> + 2E,
      tr(A Hess S) = sum sqrt(l) coth(t sqrt(l)) (cot branch for l < 0, 1/t for l = 0),
      V'/V = -tr(A Hess S) / 2 for the amplitude V(t).
    """
    report = report if report is not None else VerificationReport("lemma")
    lam = np.linalg.eigvalsh(spec.spectral.D)
    for x, x0, t in points:
        x = np.asarray(x, dtype=float)
        x0 = np.asarray(x0, dtype=float)

        def S(pts):
            pts = np.atleast_2d(pts)
            return np.array([ham.action(spec, ham.BoundaryData(x0, p, t)) for p in pts])

        hx = 1e-2 * (1.0 + float(np.linalg.norm(x)))
        grad, hess = fd_spatial(S, x, hx)
        E = ham.energy(spec, ham.BoundaryData(x0, x, t))
        lhs1 = grad @ spec.A @ grad
        rhs1 = 4.0 * x @ spec.B @ x + 2.0 * E
        report.add("eikonal", abs(lhs1 - rhs1), 1.0 + abs(lhs1) + abs(rhs1), tol, x=x, x0=x0, t=t)

        terms = []
        for l in lam:
            if l > 1e-12:
                r = math.sqrt(l)
                terms.append(r / math.tanh(r * t))
            elif l < -1e-12:
                k = math.sqrt(-l)
                terms.append(k / math.tan(k * t))
            else:
                terms.append(1.0 / t)
        tr = float(np.sum(spec.A * hess))
        report.add("trace", abs(tr - sum(terms)), 1.0 + sum(abs(v) for v in terms), tol, x=x, x0=x0, t=t)

        def V(s):
            amp, _, _ = ker.ls_parts(spec, s)
            return amp

        ht = 1e-3 * t
        dlogv = fd_time_derivative(V, t, ht) / V(t)
        report.add("transport", abs(dlogv + 0.5 * tr), 1.0 + abs(0.5 * tr), tol, x=x, x0=x0, t=t)
    return report


def geodesic_checks(spec: OperatorSpec, bd: ham.BoundaryData, tols=None, report=None, n_s=10):
    """Boundary, ODE, shooting, energy conservation and dS/dt = -E checks."""
    tol = {"boundary": 1e-9, "ode": 1e-5, "shooting": 1e-7, "energy": 1e-6, "action_rate": 1e-5}
    tol.update(tols or {})
    report = report if report is not None else VerificationReport("geodesic")
    gs = ham.solve_geodesic(spec, bd)
    t = bd.t
    D = spec.spectral.D
    Ainv = spec.A_inv
    loc = {"x0": bd.x0, "x1": bd.x1, "t": t}
    ends = ham.eval_geodesic_basis(gs, np.array([0.0, t]))
    bres = np.linalg.norm(ends[0] - bd.x0) + np.linalg.norm(ends[1] - bd.x1)
    bscale = 1.0 + np.linalg.norm(bd.x0) + np.linalg.norm(bd.x1)
    report.add("boundary", bres, bscale, tol["boundary"], **loc)

    s_grid = np.linspace(0.1, 0.9, n_s) * t
    hs = 1e-4 * t
    X = ham.eval_geodesic(gs, s_grid)
    Xs = [ham.eval_geodesic(gs, s_grid + o * hs) for o in OFFSETS]
    Xd = sum(c * v for c, v in zip(D1, Xs)) / hs
    Xdd = sum(c * v for c, v in zip(D2, Xs)) / hs**2
    ode_res = np.max(np.linalg.norm(Xdd - X @ D.T, axis=1))
    ode_scale = (np.linalg.norm(bd.x0) + np.linalg.norm(bd.x1) + 1e-300) * max(np.linalg.norm(D, 2), 1.0 / t**2)
    report.add("ode", ode_res, ode_scale, tol["ode"], **loc)

    try:
        shoot = ham.shooting_oracle(spec, bd)
        Xc = ham.eval_geodesic(gs, np.clip(shoot.s, 0.0, t))
        sres = float(np.max(np.linalg.norm(shoot.X - Xc, axis=1)))
        report.add("shooting", sres, 1.0 + float(np.max(np.linalg.norm(Xc, axis=1))), tol["shooting"], **loc)
    except SingularShooting:
        report.add("shooting", 1.0, 1.0, tol["shooting"], singular=True, **loc)

    # conservation from finite-difference velocity and acceleration; the
    # acceleration uses a coarser step to keep roundoff below the tolerance
    E = ham.energy(spec, bd)
    h2 = 1e-3 * t
    Xdd2 = sum(c * ham.eval_geodesic(gs, s_grid + o * h2) for c, o in zip(D2, OFFSETS)) / h2**2
    kin = np.einsum("ij,jk,ik->i", Xd, Ainv, Xd)
    pot = np.einsum("ij,jk,ik->i", Xdd2, Ainv, X)
    e_path = 0.5 * (kin - pot)
    e_scale = 0.5 * (kin + np.abs(pot))
    idx = int(np.argmax(np.abs(e_path - E) / np.maximum(e_scale, 1e-300)))
    report.add("energy", abs(e_path[idx] - E), max(e_scale[idx], 1e-300), tol["energy"], **loc)

    ht = 1e-4 * t
    dS = fd_time_derivative(lambda s: ham.action(spec, ham.BoundaryData(bd.x0, bd.x1, s)), t, ht)
    report.add("action_rate", abs(dS + E), 1.0 + abs(E), tol["action_rate"], **loc)
    return report


def fourier_quadrature(a, b_signed, xi, t, rtol=1e-10):
    """int K(x; t) e^{-2 pi i xi x} dx for n = 1 with the kernel centred at 0."""
    a = float(np.atleast_1d(a)[0])
    bs = float(np.atleast_1d(b_signed)[0])
    xi = float(np.atleast_1d(xi)[0])
    R = oracle_radius([[a * a]], t)
    width = math.sqrt(2.0 * t) * a

    def integrand(x):
        k = ker.kernel_LS_diag([a], [bs], x[:, None], np.zeros(1), t)
        return k * np.exp(-2j * math.pi * xi * x)

    return integrate(integrand, -R, R, peak_breaks(0.0, width, R), rtol=rtol).value


def fourier_check(
    a, b_signed, xis, ts, trend_xi=0.3, trend_ts=(0.4, 0.2, 0.1, 0.05), final_tol=0.15, tol=1e-5, report=None
):
    """Quadrature transform against the closed form, plus the t -> 0 trend.

    The trend is evaluated from the closed form at ``trend_xi`` along
    ``trend_ts``; each consecutive pair must decrease and the last value of
    |K^ - 1| must stay below ``final_tol``.
    """
    report = report if report is not None else VerificationReport("fourier")
    for t in ts:
        for xi in xis:
            quad_val = fourier_quadrature(a, b_signed, xi, t)
            closed = ker.fourier_closed_form(a, b_signed, [xi], t)
            report.add("fourier_quadrature", abs(quad_val - closed), abs(closed), tol, a=a, b=b_signed, xi=xi, t=t)
        zero = ker.fourier_closed_form(a, b_signed, [0.0], t)
        norm = ker.normalization_integral(a, b_signed, t)
        report.add("fourier_zero", abs(zero - norm), abs(norm), 1e-15, a=a, b=b_signed, t=t)
    if not trend_ts:
        return report
    dev = [abs(ker.fourier_closed_form(a, b_signed, [trend_xi], s) - 1.0) for s in trend_ts]
    for k in range(1, len(dev)):
        report.add("fourier_trend", max(0.0, dev[k] - dev[k - 1]), 1.0, 0.0, xi=trend_xi, t=trend_ts[k], deviations=dev)
    report.add("fourier_final", dev[-1], 1.0, final_tol, xi=trend_xi, t=trend_ts[-1])
    return report


def normalization_check(a, b_signed, t, tol=1e-6, report=None):
    """Quadrature of int K dx against prod sech^(1/2) prod sec^(1/2) for n = 1 or 2."""
    report = report if report is not None else VerificationReport("normalization")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    bs = np.atleast_1d(np.asarray(b_signed, dtype=float))
    n = a.size
    R = oracle_radius(np.diag(a**2), t)
    widths = np.sqrt(2.0 * t) * a
    closed = ker.normalization_integral(a, bs, t)
    if n == 1:
        val = integrate(
            lambda x: ker.kernel_LS_diag(a, bs, x[:, None], np.zeros(1), t), -R, R, peak_breaks(0.0, widths[0], R)
        ).value
    elif n == 2:
        def f2(X, Y):
            return ker.kernel_LS_diag(a, bs, np.stack([X, Y], axis=-1), np.zeros(2), t)

        breaks = (peak_breaks(0.0, widths[0], R, (0.0, 2.0, 6.0)), peak_breaks(0.0, widths[1], R, (0.0, 2.0, 6.0)))
        val = integrate_2d(f2, ((-R, R), (-R, R)), breaks).value
    else:
        raise ValueError("normalization quadrature supports n <= 2")
    report.add("normalization", abs(val - closed), abs(closed), tol, a=a, b=bs, t=t)
    return report


@dataclass(frozen=True)
class Bump:
    """exp(1 - 1/(1 - r^2)) with r = (x - center)/radius, zero outside |r| < 1."""

    center: float
    radius: float

    def __call__(self, x):
        r = (np.asarray(x, dtype=float) - self.center) / self.radius
        inside = np.abs(r) < 1.0
        out = np.zeros_like(r)
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
        return out

    @property
    def name(self):
        return f"bump(c={self.center:g},R={self.radius:g})"


DEFAULT_BUMPS = (Bump(0.0, 2.0), Bump(0.5, 3.0), Bump(-1.0, 4.0))
DELTA_TIMES = (1e-1, 1e-2, 1e-3, 1e-4)


def delta_check(spec: OperatorSpec, test_functions=DEFAULT_BUMPS, ts=DELTA_TIMES, tol=1e-4, report=None):
    """|int K(x, 0; t) phi(x) dx - phi(0)| along a decreasing time sequence (n = 1).

    Passes when the last error is below ``tol`` and the last three errors decrease.
    """
    if spec.n != 1:
        raise ValueError("delta_check is one-dimensional")
    report = report if report is not None else VerificationReport("delta")
    a2 = float(spec.A[0, 0])
    for phi in test_functions:
        errs = []
        for t in ts:
            width = math.sqrt(2.0 * t * a2)
            lo, hi = phi.center - phi.radius, phi.center + phi.radius
            breaks = [p for p in peak_breaks(0.0, width, max(abs(lo), abs(hi)) + 1.0) if lo < p < hi]

            def integrand(x, t=t):
                return ker.kernel_LS(spec, x[:, None], np.zeros(1), t) * phi(x)

            val = integrate(integrand, lo, hi, breaks, rtol=1e-10, atol=1e-14).value
            errs.append(abs(val - float(phi(np.array([0.0]))[0])))
        report.add("delta_final", errs[-1], 1.0, tol, phi=phi.name, t=ts[-1], errors=errs, B=float(spec.B[0, 0]))
        for k in range(len(errs) - 2, len(errs)):
            report.add("delta_trend", max(0.0, errs[k] - errs[k - 1]), 1.0, 0.0, phi=phi.name, t=ts[k])
    return report


def chapman_kolmogorov(kernel, x, z, s, t, weight=None, center=0.0, width=1.0, radius=30.0, tol=1e-5):
    """|int K(x, y; t) K(y, z; s) w(y) dy - K(x, z; s + t)| / |K(x, z; s + t)| for n = 1.

    ``kernel(x, x0, t)`` takes point arrays of shape (m, 1); ``weight`` is an
    optional density w(y) for weighted semigroups.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))

    def integrand(y):
        ys = y[:, None]
        val = kernel(x, ys, t) * kernel(ys, z, s)
        return val if weight is None else val * weight(y)

    breaks = peak_breaks(center, width, radius)
    got = integrate(integrand, -radius, radius, breaks, rtol=1e-11).value
    want = complex(kernel(x, z, s + t))
    return ResidualSample("chapman_kolmogorov", {"x": x, "z": z, "s": s, "t": t}, abs(got - want), abs(want), tol)


# suites

def _mixed_signatures(n, k):
    if n == 1:
        return ("hyperbolic", "trigonometric")[k % 2]
    return ("hyperbolic", "trigonometric", "mixed", "any")[k % 4]


def suite_riccati(seed=0, n_instances=50, times=(0.1, 0.3, 0.7), tol=1e-5, rk4_tol=1e-7):
    rng = np.random.default_rng(seed)
    report = VerificationReport("riccati", seed)
    for k in range(n_instances):
        n = 1 + k % 4
        spec = random_spec(rng, n, _mixed_signatures(n, k // 4), lower_order=(k % 3 == 0), times=times)
        res = ode_residuals(spec, times)
        for name in EQUATIONS:
            for t, r, sc in zip(res.times, res.residuals[name], res.scales[name]):
                report.add(f"ode_{name}", r, sc, tol, instance=k, n=n, t=t)
    # RK4 oracle on instances regular over [0.01, 0.5]
    t0, t1 = 0.01, 0.5
    for k in range(10):
        n = 1 + k % 4
        while True:
            spec = random_spec(rng, n, _mixed_signatures(n, k))
            hits = singular_times(spec.spectral, t1 + 0.2)
            if not hits:
                break
        got = rk4_propagate_alpha(spec, t0, t1, steps=4096)
        want = coefficients(spec, t1).alpha
        report.add("rk4_alpha", np.linalg.norm(got - want), 1.0 + np.linalg.norm(want), rk4_tol, instance=k, n=n)
    return report


def suite_pde(seed=0, n_instances=20, n_points=20, tol=1e-5):
    rng = np.random.default_rng(seed)
    report = VerificationReport("pde", seed)
    for k in range(n_instances):
        n = 1 + k % 4
        sig = "mixed" if (n > 1 and k % 2 == 0) else _mixed_signatures(n, k)
        spec = random_spec(rng, n, sig, lower_order=(k % 2 == 1 or k % 5 == 0))
        pts = []
        for _ in range(n_points):
            t = random_time(rng, spec)
            pts.append((rng.standard_normal(n), rng.standard_normal(n), t))
        pde_residual(spec, pts, tol=tol, report=report)
    return report


def _geodesic_instance(rng, k):
    n = 1 + k % 4
    kind = k % 5
    if kind == 4:
        return random_nonsymmetric_spec(rng, n)
    if kind == 3 and k % 10 == 3:
        return OperatorSpec(random_spd(rng, n), np.zeros((n, n)))
    sig = ("hyperbolic", "trigonometric", "mixed", "any")[kind]
    if sig == "mixed" and n == 1:
        sig = "any"
    return random_spec(rng, n, sig)


def suite_geodesic(seed=0, n_instances=100):
    rng = np.random.default_rng(seed)
    report = VerificationReport("geodesic", seed)
    for k in range(n_instances):
        spec = _geodesic_instance(rng, k)
        t = random_time(rng, spec)
        bd = ham.BoundaryData(rng.standard_normal(spec.n), rng.standard_normal(spec.n), t)
        geodesic_checks(spec, bd, report=report)
    return report


def suite_lemma(seed=0, n_instances=10, n_points=5, tol=1e-5):
    rng = np.random.default_rng(seed)
    report = VerificationReport("lemma", seed)
    for k in range(n_instances):
        if k == 0:
            spec = OperatorSpec(np.eye(1), np.eye(1))
        elif k == 1:
            spec = random_spec(rng, 3, "mixed")
        else:
            n = 1 + k % 4
            spec = random_spec(rng, n, _mixed_signatures(n, k))
        pts = [(rng.standard_normal(spec.n), rng.standard_normal(spec.n), random_time(rng, spec)) for _ in range(n_points)]
        lemma_identities(spec, pts, tol=tol, report=report)
    return report


FOURIER_CASES = ((1.0, 1.0), (1.0, -1.0), (0.7, 2.0), (1.3, -0.5))


def suite_fourier(seed=0):
    rng = np.random.default_rng(seed)
    report = VerificationReport("fourier", seed)
    xis = [0.3] + list(np.round(rng.uniform(0.0, 0.5, size=4), 6))
    for a, b in FOURIER_CASES:
        ts = [0.25] if (a, b) == (1.0, 1.0) else [float(np.round(rng.uniform(0.1, 0.4), 6))]
        if (a, b) == (1.0, 1.0):
            fourier_check(a, b, xis, ts, report=report)
        else:
            fourier_check(a, b, xis[:3], ts, trend_ts=(), report=report)
    for a, b in FOURIER_CASES:
        for t in (0.1, 0.25, 0.5):
            normalization_check([a], [b], t, report=report)
    normalization_check([1.0, 0.8], [1.0, -1.0], 0.3, report=report)
    return report


def suite_delta(seed=0):
    report = VerificationReport("delta", seed)
    for b in (1.0, -1.0):
        delta_check(OperatorSpec(np.eye(1), np.array([[b]])), report=report)
    return report


def _first_singular(spec, t_max=50.0):
    hits = singular_times(spec.spectral, t_max)
    return hits[0].t if hits else math.inf


def suite_specializations(seed=0, n_instances=20):
    rng = np.random.default_rng(seed)
    report = VerificationReport("specializations", seed)
    for k in range(n_instances):
        n = 1 + k % 4
        A = random_spd(rng, n)
        t = float(rng.uniform(0.1, 1.0))
        x, x0 = rng.standard_normal(n), rng.standard_normal(n)
        g = ker.kernel_gaussian(A, x, x0, t)
        ls = complex(ker.kernel_LS(OperatorSpec(A, np.zeros((n, n))), x, x0, t))
        report.add("gaussian", abs(ls - g), abs(g), 1e-12, instance=k, t=t)

        a = np.exp(rng.uniform(math.log(0.5), math.log(2.0), size=n))
        b = rng.uniform(-2.0, 2.0, size=n)
        spec = OperatorSpec(np.diag(a**2), np.diag(b))
        t = float(rng.uniform(0.05, 0.95)) * min(_first_singular(spec), 2.0)
        d = complex(ker.kernel_LS_diag(a, b, x, x0, t))
        s = complex(ker.kernel_LS(spec, x, x0, t))
        report.add("diag_vs_spectral", abs(d - s), abs(s), 1e-12, instance=k, t=t)

        bp = np.abs(b) + 0.1
        m = complex(ker.kernel_mehler(a, np.sqrt(bp), x, x0, t))
        dm = complex(ker.kernel_LS_diag(a, bp, x, x0, t))
        report.add("mehler_vs_diag", abs(m - dm), abs(dm), 1e-12, instance=k, t=t)

    for k in range(5):
        a2 = float(np.exp(rng.uniform(math.log(0.5), math.log(2.0))))
        bb = float(rng.uniform(0.2, 1.5))
        A, B = np.array([[a2]]), np.array([[bb]])
        s, t = (float(v) for v in np.round(rng.uniform(0.1, 0.6, size=2), 6))
        x, z = rng.uniform(-1.0, 1.0, size=2)

        def kern(p, q, tt, A=A, B=B):
            return ker.kernel_ou(A, B, p, q, tt)

        def weight(y, A=A, B=B):
            return np.exp(-ker.ou_weight(A, B, y[:, None]))

        sample = chapman_kolmogorov(kern, x, z, s, t, weight=weight, width=math.sqrt(2 * t * a2), radius=40.0)
        report.samples.append(ResidualSample("ou_weighted_ck", sample.location, sample.residual, sample.scale, 1e-5))
    return report


def suite_ansatz(seed=0, n_instances=20, n_points=5, tol=1e-11):
    rng = np.random.default_rng(seed)
    report = VerificationReport("ansatz", seed)
    for k in range(n_instances):
        n = 1 + k % 4
        spec = random_spec(rng, n, _mixed_signatures(n, k), lower_order=(k % 4 != 0))
        t = random_time(rng, spec)
        coef = coefficients(spec, t)
        x = rng.standard_normal((n_points, n))
        x0 = rng.standard_normal(n)
        got = assemble_ansatz(coef, x, x0)
        want = ker.kernel_L(spec, x, x0, t)
        rel = np.abs(got - want) / np.abs(want)
        j = int(np.argmax(rel))
        report.add("ansatz_vs_kernel", abs(got[j] - want[j]), abs(want[j]), tol, instance=k, n=n, t=t)
    return report


def suite_singular(seed=0, n_instances=6, offsets=(0.0, 5e-9, -5e-9), t_max=3.0):
    """Guarded evaluation raises SingularTime near k pi / sqrt(-lambda); the
    shooting oracle flags the same times and accepts regular ones."""
    rng = np.random.default_rng(seed)
    report = VerificationReport("singular", seed)
    for k in range(n_instances):
        n = 1 + k % 3
        spec = random_spec(rng, n, "trigonometric" if k % 2 == 0 else ("mixed" if n > 1 else "trigonometric"))
        hits = singular_times(spec.spectral, t_max)[:4]
        x = rng.standard_normal(n)
        for e in hits:
            for off in offsets:
                ts = e.t + off
                raised = 0
                for fn in (
                    lambda: ker.kernel_LS(spec, x, x, ts),
                    lambda: coefficients(spec, ts),
                    lambda: ham.solve_geodesic(spec, ham.BoundaryData(x, x, ts)),
                ):
                    try:
                        fn()
                    except SingularTime:
                        raised += 1
                report.add("raises_singular_time", 3 - raised, 1.0, 0.0, instance=k, t=ts, k=e.k)
            for off in (0.0, 1e-7, -1e-7):
                flagged = 0.0
                try:
                    ham.shooting_oracle(spec, ham.BoundaryData(x, x, e.t + off))
                    flagged = 1.0
                except SingularShooting:
                    pass
                report.add("shooting_flags_singular", flagged, 1.0, 0.0, instance=k, t=e.t + off)
        for _ in range(3):
            tr = random_time(rng, spec, lo=0.1, hi=t_max)
            missed = 0.0
            try:
                ham.shooting_oracle(spec, ham.BoundaryData(x, x, tr))
            except SingularShooting:
                missed = 1.0
            report.add("shooting_accepts_regular", missed, 1.0, 0.0, instance=k, t=tr)
    return report


SUITES = {
    "riccati": suite_riccati,
    "pde": suite_pde,
    "geodesic": suite_geodesic,
    "lemma": suite_lemma,
    "fourier": suite_fourier,
    "delta": suite_delta,
    "specializations": suite_specializations,
    "ansatz": suite_ansatz,
    "singular": suite_singular,
}


def run_suites(names=None, seed=0) -> list:
    names = list(SUITES) if names is None else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n](seed) for n in names]
