"""Frame integration for prescribed conformal cmc data.

Data (omega, H, Q, R) with constant H, Q a function of u alone and R of
v alone is admissible when the single remaining integrability condition

    omega_uv + (H^2 - 1)/2 * e^omega - 2 Q R e^-omega = 0

holds (the mean curvature being constant makes the other two conditions
vanish identically for such split data).  Admissible data feeds two
coupled linear systems per frame,

    dPhi_i = Phi_i (U_i du + V_i dv),

whose zero-curvature condition is exactly the equation above; the
product Phi_1 Phi_2^T then has mean curvature H in the unimodular
quadric, and Psi_1 Psi_2^-1 (with the second set of matrices) has mean
curvature -H against the same orientation rule.

Derivatives of closed-form omega are evaluated in forward mode through
the expression tree, so the compatibility gate tests the equation
itself, not a discretization of it; sampled omega falls back to
4th-order differences.  Integration marches the bottom edge in u and
then every column in v; a second sweep (left edge, then rows) measures
the path-independence defect, which is the numerical witness of the
zero-curvature condition.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .algebra import adjugate, det2, check_unimodular
from .config import DEFAULT_TOL
from .fields import ScalarField1D, as_field1d, as_field2d, fd_derivative
from .nullcurves import (KIND_F1, KIND_F2_MU, KIND_F2_NU, IntegrationError,
                         SurfaceGridH31)
from .weierstrass import WeierstrassData


class CompatibilityError(ValueError):
    pass


@dataclass
class GmcData:
    """Split conformal cmc data: omega(u, v), constant H, Q(u), R(v)."""

    omega: object
    H: float
    Q: object
    R: object

    @classmethod
    def build(cls, omega, H, Q, R):
        return cls(as_field2d(omega), float(H), as_field1d(Q, var="u"),
                   as_field1d(R, var="v"))


def gmc_residual(data, us, vs):
    """Pointwise residuals of the integrability conditions on a grid.

    Returns two grids: the signed residual of

        omega_uv + (H^2 - 1)/2 * e^omega - 2 Q R e^-omega

    and the larger of the two mean-curvature flux residuals
    |H_u - 2 e^-omega Q_v| and |H_v - 2 e^-omega R_u|.  The second is
    zero by construction for split data with constant H, and is
    computed (trivially) rather than assumed so the return shape does
    not depend on the data.
    """
    us = np.asarray(us, dtype=float)
    vs = np.asarray(vs, dtype=float)
    w, _, _, wuv = data.omega.with_derivatives(us[:, None], vs[None, :])
    q = np.asarray(data.Q(us), dtype=float)[:, None]
    r = np.asarray(data.R(vs), dtype=float)[None, :]
    e = np.exp(w)
    first = wuv + 0.5 * (data.H ** 2 - 1.0) * e - 2.0 * q * r / e
    # H is a constant and Q, R split by variable: both flux terms vanish.
    second = np.zeros_like(first)
    return first, second


def _pack(a, b, c, d):
    """Stack four broadcastable entry grids into (..., 2, 2) matrices."""
    shape = np.broadcast_shapes(*(np.shape(x) for x in (a, b, c, d)))
    m = np.empty(shape + (2, 2))
    m[..., 0, 0] = a
    m[..., 0, 1] = b
    m[..., 1, 0] = c
    m[..., 1, 1] = d
    return m


def lax_matrices(data, action, u, v):
    """The four coefficient matrices (U1, V1, U2, V2) at points (u, v)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w, wu, wv, _ = data.omega.with_derivatives(u, v)
    q = np.asarray(data.Q(u), dtype=float)
    r = np.asarray(data.R(v), dtype=float)
    h = data.H
    ep = np.exp(0.5 * w)
    em = np.exp(-0.5 * w)
    u1 = _pack(wu / 4.0, 0.5 * ep * (h + 1.0), -em * q, -wu / 4.0)
    v1 = _pack(-wv / 4.0, em * r, -0.5 * ep * (h - 1.0), wv / 4.0)
    if action == "mu":
        u2 = _pack(-wu / 4.0, em * q, -0.5 * ep * (h - 1.0), wu / 4.0)
        v2 = _pack(wv / 4.0, 0.5 * ep * (h + 1.0), -em * r, -wv / 4.0)
    elif action == "nu":
        u2 = _pack(wu / 4.0, 0.5 * ep * (h - 1.0), -em * q, -wu / 4.0)
        v2 = _pack(-wv / 4.0, em * r, -0.5 * ep * (h + 1.0), wv / 4.0)
    else:
        raise ValueError("action must be 'mu' or 'nu'")
    return u1, v1, u2, v2


@dataclass
class LaxFrames:
    """Both integrated frames on a grid, with the sweep defect."""

    us: np.ndarray
    vs: np.ndarray
    phi1: np.ndarray   # (nu, nv, 2, 2)
    phi2: np.ndarray
    action: str
    path_defect: float
    data: GmcData

    def assemble(self, tol=DEFAULT_TOL):
        """Product surface Phi1 Phi2^T (mu) or Phi1 Phi2^-1 (nu)."""
        if self.action == "mu":
            points = np.einsum("ijab,ijcb->ijac", self.phi1, self.phi2)
        else:
            points = np.einsum("ijab,ijbc->ijac", self.phi1, adjugate(self.phi2))
        w = self.data.omega(self.us[:, None], self.vs[None, :])
        mask = np.broadcast_to(np.exp(w) < tol.degen, points.shape[:2]).copy()
        return SurfaceGridH31(us=self.us, vs=self.vs, points=points,
                              mask=mask, assembly=self.action)


def _rk4_batch(y, coef, t, h):
    """One RK4 step of dY = Y C(t) for a batch of matrices."""
    k1 = y @ coef(t)
    k2 = (y + 0.5 * h * k1) @ coef(t + 0.5 * h)
    k3 = (y + 0.5 * h * k2) @ coef(t + 0.5 * h)
    k4 = (y + h * k3) @ coef(t + h)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _sweep(data, action, us, vs, init1, init2, substeps, u_first):
    nu, nv = len(us), len(vs)
    out1 = np.empty((nu, nv, 2, 2))
    out2 = np.empty((nu, nv, 2, 2))

    def mats(u, v):
        return lax_matrices(data, action, u, v)

    if u_first:
        # bottom edge in u, then every column in v
        edge1, edge2 = np.array(init1), np.array(init2)
        out1[0, 0], out2[0, 0] = edge1, edge2
        h = (us[-1] - us[0]) / ((nu - 1) * substeps) if nu > 1 else 0.0
        for i in range(1, nu):
            t = us[i - 1]
            for k in range(substeps):
                edge1 = _rk4_batch(edge1, lambda s: mats(s, vs[0])[0], t + k * h, h)
                edge2 = _rk4_batch(edge2, lambda s: mats(s, vs[0])[2], t + k * h, h)
            out1[i, 0], out2[i, 0] = edge1, edge2
        col1, col2 = out1[:, 0].copy(), out2[:, 0].copy()
        h = (vs[-1] - vs[0]) / ((nv - 1) * substeps) if nv > 1 else 0.0
        for j in range(1, nv):
            t = vs[j - 1]
            for k in range(substeps):
                col1 = _rk4_batch(col1, lambda s: mats(us, np.full(nu, s))[1], t + k * h, h)
                col2 = _rk4_batch(col2, lambda s: mats(us, np.full(nu, s))[3], t + k * h, h)
            out1[:, j], out2[:, j] = col1, col2
        return out1, out2

    # left edge in v, then every row in u
    edge1, edge2 = np.array(init1), np.array(init2)
    out1[0, 0], out2[0, 0] = edge1, edge2
    h = (vs[-1] - vs[0]) / ((nv - 1) * substeps) if nv > 1 else 0.0
    for j in range(1, nv):
        t = vs[j - 1]
        for k in range(substeps):
            edge1 = _rk4_batch(edge1, lambda s: mats(us[0], s)[1], t + k * h, h)
            edge2 = _rk4_batch(edge2, lambda s: mats(us[0], s)[3], t + k * h, h)
        out1[0, j], out2[0, j] = edge1, edge2
    row1, row2 = out1[0].copy(), out2[0].copy()
    h = (us[-1] - us[0]) / ((nu - 1) * substeps) if nu > 1 else 0.0
    for i in range(1, nu):
        t = us[i - 1]
        for k in range(substeps):
            row1 = _rk4_batch(row1, lambda s: mats(np.full(nv, s), vs)[0], t + k * h, h)
            row2 = _rk4_batch(row2, lambda s: mats(np.full(nv, s), vs)[2], t + k * h, h)
        out1[i], out2[i] = row1, row2
    return out1, out2


def integrate_lax(data, action, domain, nu, nv, init=None, substeps=1,
                  tol=DEFAULT_TOL, gate=True):
    """Integrate both frames over a rectangle after gating the data.

    The compatibility gate evaluates the integrability residual on the
    grid (exactly for closed-form omega) and rejects incompatible data.
    The main sweep is bottom edge then columns; the alternate sweep
    (left edge then rows) only measures the path-independence defect at
    the far corner, where it is largest.
    """
    if nu < 2 or nv < 2:
        raise ValueError("need at least a 2x2 frame grid")
    u0, u1, v0, v1 = domain
    us = np.linspace(u0, u1, nu)
    vs = np.linspace(v0, v1, nv)
    if gate:
        first, second = gmc_residual(data, us, vs)
        res = max(float(np.max(np.abs(first))), float(np.max(second)))
        if res > tol.compat:
            raise CompatibilityError(
                f"data fails the integrability condition: max residual {res:.3e} "
                f"> {tol.compat:g}")
    if init is None:
        init = (np.eye(2), np.eye(2))
    for m in init:
        check_unimodular(np.asarray(m, dtype=float), tol, what="initial frame")

    a1, a2 = _sweep(data, action, us, vs, init[0], init[1], substeps, True)
    b1, b2 = _sweep(data, action, us, vs, init[0], init[1], substeps, False)
    defect = max(float(np.max(np.abs(a1[-1, -1] - b1[-1, -1]))),
                 float(np.max(np.abs(a2[-1, -1] - b2[-1, -1]))))
    if defect > tol.path:
        warnings.warn(f"far-corner path defect {defect:.3e} exceeds {tol.path:g}",
                      RuntimeWarning, stacklevel=2)

    drift = max(float(np.max(np.abs(det2(a1) - 1.0))),
                float(np.max(np.abs(det2(a2) - 1.0))))
    if drift > tol.drift:
        raise IntegrationError(
            f"determinant drift {drift:.3e} exceeds {tol.drift:g} in the frame sweep")
    return LaxFrames(us=us, vs=vs, phi1=a1, phi2=a2, action=action,
                     path_defect=defect, data=data)


def _leg_data(curve, tol):
    """Recover (s, w) samples from one integrated null frame leg."""
    ts = curve.ts
    dt = float(ts[1] - ts[0])
    dot = fd_derivative(curve.samples, dt, axis=0)
    coef = adjugate(curve.samples) @ dot
    a = coef[:, 0, 0]
    b = coef[:, 0, 1]
    c = coef[:, 1, 0]
    nullity = float(np.max(np.abs(a * a + b * c)))
    if nullity > 1e-8:
        raise ValueError(f"leg is not null: max |a^2 + bc| = {nullity:.3e}")
    if curve.kind == KIND_F2_NU:
        # left-system leg: F^-1 dF = [[-sw, -w], [s^2 w, sw]] dv
        den, s_num, w = b, a, -b
    else:
        den, s_num, w = c, a, c
    bad = np.min(np.abs(den))
    if bad < tol.pole:
        raise ZeroDivisionError(
            "direction entry of the connection vanishes on the range "
            f"(min |.| = {bad:.3e}); data only recoverable locally")
    return s_num / den, w


def extract_weierstrass_data(f1, f2, tol=DEFAULT_TOL):
    """Read (q, f, r, g) back off a pair of integrated null frame legs.

    Differentiates the samples (4th order), forms F^-1 dF, and divides
    entries.  The frames must be null within 1e-8 and the dividing
    entry must not vanish anywhere on the range.
    """
    if f1.kind != KIND_F1:
        raise ValueError(f"first leg must have kind {KIND_F1!r}, got {f1.kind!r}")
    if f2.kind not in (KIND_F2_MU, KIND_F2_NU):
        raise ValueError(f"second leg has kind {f2.kind!r}")
    q, f = _leg_data(f1, tol)
    r, g = _leg_data(f2, tol)
    return WeierstrassData.build(
        q=ScalarField1D.from_samples(f1.t0, (f1.t1 - f1.t0) / (f1.n - 1), q),
        f=ScalarField1D.from_samples(f1.t0, (f1.t1 - f1.t0) / (f1.n - 1), f),
        r=ScalarField1D.from_samples(f2.t0, (f2.t1 - f2.t0) / (f2.n - 1), r),
        g=ScalarField1D.from_samples(f2.t0, (f2.t1 - f2.t0) / (f2.n - 1), g))
