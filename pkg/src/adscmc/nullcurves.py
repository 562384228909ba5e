"""Null curves in SL(2,R) and the product surfaces they span.

A curve F(t) in SL(2,R) is null when det(F^-1 dF) = 0.  The curves used
here solve

    F1^-1 dF1 = [[q, -q^2], [1, -q]] f(u) du        (the u leg)
    F2^-1 dF2 = [[r, -r^2], [1, -r]] g(v) dv        (the v leg, mu)
    (dF2^-1) F2 = [[r, 1], [-r^2, -r]] g(v) dv      (the v leg, nu)

with scalar fields (q, f) or (r, g).  The coefficient matrices are
nilpotent, so the legs stay unimodular and RK4 tracks them to its usual
fourth order.  For the nu leg the inverse G = F2^-1 is integrated
directly as a left-coefficient system; both G and F2 are stored so
assembly never inverts anything.

Products phi = F1 F2^T have mean curvature +1 in the unimodular quadric
(with the orientation fixed downstream); products psi = F1 F2^-1 have
mean curvature -1.  The induced metric coefficient of either product is
-det of the summed leg coefficients, which is evaluated exactly from
the attached fields rather than by differencing the grid.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import adjugate, det2, check_unimodular
from .config import DEFAULT_TOL
from .fields import as_field1d

KIND_F1 = "F1-holomorphic"
KIND_F2_MU = "F2-antiholomorphic-mu"
KIND_F2_NU = "F2-antiholomorphic-nu"
_KINDS = (KIND_F1, KIND_F2_MU, KIND_F2_NU)


class IntegrationError(RuntimeError):
    pass


@dataclass
class FrameCurve:
    """Uniform samples of one integrated leg."""

    kind: str
    s_field: object
    w_field: object
    t0: float
    t1: float
    n: int
    samples: np.ndarray               # (n, 2, 2) frame values
    inv_samples: np.ndarray = None    # (n, 2, 2) G = F^-1, nu leg only
    det_drift: float = 0.0

    @property
    def ts(self):
        return np.linspace(self.t0, self.t1, self.n)


def null_coefficient(kind, s, w):
    """Coefficient matrix of one leg at parameter values with fields s, w.

    s and w may be arrays; the result has shape s.shape + (2, 2) and is
    nilpotent (trace and determinant both vanish identically).
    """
    s = np.asarray(s, dtype=float)
    w = np.asarray(w, dtype=float)
    c = np.empty(np.broadcast(s, w).shape + (2, 2))
    if kind in (KIND_F1, KIND_F2_MU):
        c[..., 0, 0] = s
        c[..., 0, 1] = -s * s
        c[..., 1, 0] = 1.0
        c[..., 1, 1] = -s
    elif kind == KIND_F2_NU:
        c[..., 0, 0] = s
        c[..., 0, 1] = 1.0
        c[..., 1, 0] = -s * s
        c[..., 1, 1] = -s
    else:
        raise ValueError(f"unknown leg kind {kind!r}; expected one of {_KINDS}")
    return c * w[..., None, None]


def _rk4(coef_at, y, t, h, left):
    if left:
        k1 = coef_at(t) @ y
        k2 = coef_at(t + 0.5 * h) @ (y + 0.5 * h * k1)
        k3 = coef_at(t + 0.5 * h) @ (y + 0.5 * h * k2)
        k4 = coef_at(t + h) @ (y + h * k3)
    else:
        k1 = y @ coef_at(t)
        k2 = (y + 0.5 * h * k1) @ coef_at(t + 0.5 * h)
        k3 = (y + 0.5 * h * k2) @ coef_at(t + 0.5 * h)
        k4 = (y + h * k3) @ coef_at(t + h)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_frame(kind, s, w, t_range, n, init=None, substeps=1, tol=DEFAULT_TOL):
    """RK4 integration of one leg, sampled at n uniform nodes.

    s and w may be field objects, expression strings, or constants.
    substeps > 1 refines the integrator without changing the stored
    nodes.  Fails if the determinant drifts by more than the step
    failure tolerance.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown leg kind {kind!r}; expected one of {_KINDS}")
    if n < 2:
        raise ValueError("need at least 2 nodes")
    var = "u" if kind == KIND_F1 else "v"
    s = as_field1d(s, var=var)
    w = as_field1d(w, var=var)
    t0, t1 = float(t_range[0]), float(t_range[1])
    init = np.eye(2) if init is None else np.asarray(init, dtype=float)
    check_unimodular(init, tol, what="initial frame")

    def coef_at(t):
        return null_coefficient(kind, s(t), w(t))

    left = kind == KIND_F2_NU
    y = adjugate(init) if left else init.copy()
    out = np.empty((n, 2, 2))
    out[0] = y
    h = (t1 - t0) / ((n - 1) * substeps)
    for i in range(1, n):
        t = t0 + (i - 1) * (t1 - t0) / (n - 1)
        for k in range(substeps):
            y = _rk4(coef_at, y, t + k * h, h, left)
        out[i] = y
    drift = float(np.max(np.abs(det2(out) - 1.0)))
    if drift > tol.drift:
        raise IntegrationError(
            f"determinant drift {drift:.3e} exceeds {tol.drift:g} on the {kind} leg")
    if left:
        return FrameCurve(kind, s, w, t0, t1, n, samples=adjugate(out),
                          inv_samples=out, det_drift=drift)
    return FrameCurve(kind, s, w, t0, t1, n, samples=out, det_drift=drift)


@dataclass
class SurfaceGridH31:
    """Sampled surface in the unimodular quadric, u along axis 0."""

    us: np.ndarray
    vs: np.ndarray
    points: np.ndarray  # (nu, nv, 2, 2)
    mask: np.ndarray    # True where the exact metric coefficient is tiny
    assembly: str

    @property
    def shape(self):
        return self.points.shape[:2]


def _leg_coefs(curve):
    ts = curve.ts
    return null_coefficient(curve.kind, curve.s_field(ts), curve.w_field(ts))


def frame_metric_grid(f1, f2, assembly):
    """Exact conformal factor grid of the assembled product surface."""
    c1 = _leg_coefs(f1)
    c2 = _leg_coefs(f2)
    if assembly == "mu":
        c2 = np.swapaxes(c2, -1, -2)
    elif assembly != "nu":
        raise ValueError("assembly must be 'mu' or 'nu'")
    total = c1[:, None] + c2[None, :]
    return -det2(total)


def frame_metric(f1, f2, assembly, i, j):
    """Metric coefficient at one grid index pair."""
    c1 = null_coefficient(f1.kind, f1.s_field(f1.ts[i]), f1.w_field(f1.ts[i]))
    c2 = null_coefficient(f2.kind, f2.s_field(f2.ts[j]), f2.w_field(f2.ts[j]))
    if assembly == "mu":
        c2 = c2.T
    return float(-det2(c1 + c2))


def _check_tags(f1, f2, want_f2, assembly):
    if f1.kind != KIND_F1:
        raise ValueError(f"first factor must be a {KIND_F1} leg, got {f1.kind!r}")
    if f2.kind != want_f2:
        raise ValueError(
            f"assembly '{assembly}' needs a {want_f2} leg, got {f2.kind!r}")


def assemble_mu(f1, f2, tol=DEFAULT_TOL):
    """Grid of products F1(u_i) F2(v_j)^T with the degeneracy mask."""
    _check_tags(f1, f2, KIND_F2_MU, "mu")
    points = np.einsum("iab,jcb->ijac", f1.samples, f2.samples)
    coef = frame_metric_grid(f1, f2, "mu")
    return SurfaceGridH31(us=f1.ts, vs=f2.ts, points=points,
                          mask=np.abs(coef) < tol.degen, assembly="mu")


def assemble_nu(f1, f2, tol=DEFAULT_TOL):
    """Grid of products F1(u_i) F2(v_j)^-1 using the stored inverses."""
    _check_tags(f1, f2, KIND_F2_NU, "nu")
    points = np.einsum("iab,jbc->ijac", f1.samples, f2.inv_samples)
    coef = frame_metric_grid(f1, f2, "nu")
    return SurfaceGridH31(us=f1.ts, vs=f2.ts, points=points,
                          mask=np.abs(coef) < tol.degen, assembly="nu")
