"""First and second fundamental forms of sampled conformal surfaces.

Given a grid of surface points in the unimodular quadric (curvature -1)
or in Minkowski 3-space (curvature 0), this module measures everything
the constructions upstream claim: the null-coordinate conformality
residuals <phi_u, phi_u> and <phi_v, phi_v>, the conformal factor
e^omega = 2 <phi_u, phi_v>, the oriented unit normal, the mean curvature
H = 2 e^-omega <phi_uv, N>, the off-diagonal Hopf coefficients
Q = <phi_uu, N> and R = <phi_vv, N>, and the intrinsic curvature K by
two independent routes:

    K = kbar + H^2 - 4 Q R e^-2omega          (curvature relation)
    K = kbar + det(II I^-1)                   (shape operator route)

with II measured entrywise from finite differences of the normal.  The
agreement of the two routes (the gauss_eq residual) and the entrywise
second-form residual are the module's main outputs.

All stencils are second-order central differences on the uniform grid;
every derived field is reported on the full grid shape with NaN outside
its stencil's reach, so a quantity needing two derivative rings is NaN
on the outer two rings.  Orientation of the normal is fixed by a
positive 4x4 (or 3x3) determinant against position and the coordinate
tangents, never by convention flags hidden in formulas; flipping it is
an explicit argument.
"""

from dataclasses import dataclass

import numpy as np

from .algebra import (METRIC3, METRIC4, cross3, cross4, scalar_product3,
                      scalar_product4, vec_of_mat)
from .config import DEFAULT_TOL
from .nullcurves import SurfaceGridH31
from .weierstrass import SurfaceGridE31


@dataclass(frozen=True)
class AmbientSpec:
    """Ambient space: its name and constant sectional curvature."""

    name: str
    kbar: float

    @classmethod
    def h31(cls):
        return cls("H31", -1.0)

    @classmethod
    def e31(cls):
        return cls("E31", 0.0)

    @classmethod
    def named(cls, name):
        if name == "H31":
            return cls.h31()
        if name == "E31":
            return cls.e31()
        raise ValueError(f"unknown ambient {name!r}")


def _cd1(a, h, axis):
    """Central first difference; NaN where the stencil leaves the grid."""
    out = np.full_like(a, np.nan)
    sl = [slice(None)] * a.ndim
    hi, lo, mid = list(sl), list(sl), list(sl)
    hi[axis] = slice(2, None)
    lo[axis] = slice(0, -2)
    mid[axis] = slice(1, -1)
    out[tuple(mid)] = (a[tuple(hi)] - a[tuple(lo)]) / (2.0 * h)
    return out


def _cd2(a, h, axis):
    out = np.full_like(a, np.nan)
    sl = [slice(None)] * a.ndim
    hi, lo, mid = list(sl), list(sl), list(sl)
    hi[axis] = slice(2, None)
    lo[axis] = slice(0, -2)
    mid[axis] = slice(1, -1)
    out[tuple(mid)] = (a[tuple(hi)] - 2.0 * a[tuple(mid)] + a[tuple(lo)]) / h ** 2
    return out


def _cdm(a, hu, hv):
    out = np.full_like(a, np.nan)
    out[1:-1, 1:-1] = (a[2:, 2:] - a[2:, :-2] - a[:-2, 2:] + a[:-2, :-2]) / (4.0 * hu * hv)
    return out


def _uniform_step(ts, name):
    d = np.diff(ts)
    if d.size == 0 or np.max(np.abs(d - d[0])) > 1e-9 * max(1.0, abs(d[0])):
        raise ValueError(f"{name} nodes must be uniformly spaced")
    return float(d[0])


@dataclass
class FundamentalData:
    """Measured first and second order data of a sampled surface.

    All arrays have the full grid shape; entries are NaN wherever the
    finite-difference stencil or the degeneracy mask leaves them
    undefined.  mask is True at points with no valid first-order data.
    """

    us: np.ndarray
    vs: np.ndarray
    ambient: AmbientSpec
    metric: np.ndarray        # e^omega = 2 <phi_u, phi_v>
    omega: np.ndarray
    normal: np.ndarray        # (nu, nv, 4) or (nu, nv, 3) components
    H: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    K: np.ndarray             # curvature-relation route
    K_shape: np.ndarray       # shape-operator route (two rings in)
    conf_u: np.ndarray
    conf_v: np.ndarray
    gauss_eq: np.ndarray      # K - K_shape
    sff: np.ndarray           # entrywise second-form residual
    shape_op: np.ndarray      # (nu, nv, 2, 2) in coordinates (x, y)
    mask: np.ndarray
    hu: float
    hv: float

    def valid(self):
        return ~self.mask

    def core(self, tol=DEFAULT_TOL):
        """Valid points whose conformal factor clears the stats floor."""
        with np.errstate(invalid="ignore"):
            return self.valid() & (self.metric >= tol.metric_floor)


def _surface_vectors(surface):
    if isinstance(surface, SurfaceGridH31) or (
            hasattr(surface, "points") and np.ndim(surface.points) == 4):
        return vec_of_mat(surface.points), AmbientSpec.h31()
    return np.asarray(surface.points, dtype=float), AmbientSpec.e31()


def fundamental_data(surface, ambient=None, tol=DEFAULT_TOL, flip_normal=False,
                     strict=False):
    """Measure fundamental forms of a sampled surface grid.

    Degenerate points (2 <phi_u, phi_v> <= 0) and points where the
    normal system is rank-deficient are masked; with strict=True they
    raise instead.  flip_normal reverses the normal field, which flips
    the signs of H, Q and R while preserving K.
    """
    x, inferred = _surface_vectors(surface)
    ambient = inferred if ambient is None else ambient
    nu, nv = x.shape[0], x.shape[1]
    if nu < 5 or nv < 5:
        raise ValueError("fundamental data needs at least a 5x5 grid")
    hu = _uniform_step(surface.us, "u")
    hv = _uniform_step(surface.vs, "v")
    hyperbolic = ambient.name == "H31"
    sp = scalar_product4 if hyperbolic else scalar_product3

    xu = _cd1(x, hu, 0)
    xv = _cd1(x, hv, 1)
    xuu = _cd2(x, hu, 0)
    xvv = _cd2(x, hv, 1)
    xuv = _cdm(x, hu, hv)

    metric = 2.0 * sp(xu, xv)
    with np.errstate(invalid="ignore"):
        degenerate = np.isfinite(metric) & (metric <= 0.0)
    if strict and np.any(degenerate & ~surface.mask):
        raise ValueError(
            f"degenerate metric (2<phi_u,phi_v> <= 0) at {int(np.sum(degenerate))} grid points")
    metric = np.where(degenerate | surface.mask, np.nan, metric)
    with np.errstate(invalid="ignore", divide="ignore"):
        omega = np.log(metric)

    if hyperbolic:
        raw = METRIC4 * cross4(x, xu, xv)
    else:
        raw = METRIC3 * cross3(xu, xv)
    nn = sp(raw, raw)
    with np.errstate(invalid="ignore"):
        flat = np.isfinite(nn) & (nn <= 0.0) & ~degenerate & ~surface.mask
    if strict and np.any(flat):
        raise ValueError(f"normal solve rank-deficient at {int(np.sum(flat))} grid points")
    with np.errstate(invalid="ignore", divide="ignore"):
        nn = np.where(nn > 0.0, nn, np.nan)
        normal = raw / np.sqrt(nn)[..., None]

    frame = np.stack([x, xu - xv, xu + xv, normal] if hyperbolic
                     else [xu - xv, xu + xv, normal], axis=-2)
    with np.errstate(invalid="ignore"):
        det = np.linalg.det(np.where(np.isfinite(frame), frame, 0.0))
        sign = np.where(det < 0.0, -1.0, 1.0)
    if flip_normal:
        sign = -sign
    normal = normal * sign[..., None]

    with np.errstate(invalid="ignore", divide="ignore"):
        H = 2.0 * sp(xuv, normal) / metric
        Q = sp(xuu, normal)
        R = sp(xvv, normal)
        K = ambient.kbar + H ** 2 - 4.0 * Q * R / metric ** 2

    conf_u = sp(xu, xu)
    conf_v = sp(xv, xv)
    mask = ~np.isfinite(H)

    fd = FundamentalData(
        us=np.asarray(surface.us, dtype=float), vs=np.asarray(surface.vs, dtype=float),
        ambient=ambient, metric=metric, omega=omega, normal=normal,
        H=H, Q=Q, R=R, K=K, K_shape=None, conf_u=conf_u, conf_v=conf_v,
        gauss_eq=None, sff=None, shape_op=None, mask=mask, hu=hu, hv=hv)
    _second_form(fd, x, xu, xv, sp)
    return fd


def _second_form(fd, x, xu, xv, sp):
    """Fill the second-order fields by differencing the normal field."""
    nu_ = _cd1(fd.normal, fd.hu, 0)
    nv_ = _cd1(fd.normal, fd.hv, 1)
    phi_x, phi_y = xu - xv, xu + xv
    n_x, n_y = nu_ - nv_, nu_ + nv_
    ii_xx = -sp(phi_x, n_x)
    ii_yy = -sp(phi_y, n_y)
    ii_xy = -0.5 * (sp(phi_x, n_y) + sp(phi_y, n_x))

    e = fd.metric
    with np.errstate(invalid="ignore", divide="ignore"):
        model_xx = fd.Q + fd.R - fd.H * e
        model_yy = fd.Q + fd.R + fd.H * e
        model_xy = fd.Q - fd.R
        fd.sff = np.fmax(np.abs(ii_xx - model_xx),
                         np.fmax(np.abs(ii_yy - model_yy), np.abs(ii_xy - model_xy)))
        det_ii = ii_xx * ii_yy - ii_xy ** 2
        fd.K_shape = fd.ambient.kbar - det_ii / e ** 2
        fd.gauss_eq = fd.K - fd.K_shape
        s = np.empty(ii_xx.shape + (2, 2))
        s[..., 0, 0] = -ii_xx / e
        s[..., 0, 1] = -ii_xy / e
        s[..., 1, 0] = ii_xy / e
        s[..., 1, 1] = ii_yy / e
        fd.shape_op = s


def second_form_residual(surface, fd):
    """Entrywise gap between differenced and modelled second forms."""
    x, _ = _surface_vectors(surface)
    sp = scalar_product4 if fd.ambient.name == "H31" else scalar_product3
    xu = _cd1(x, fd.hu, 0)
    xv = _cd1(x, fd.hv, 1)
    probe = FundamentalData(**{**fd.__dict__})
    _second_form(probe, x, xu, xv, sp)
    return probe.sff


def umbilic_detect(fd, tol=DEFAULT_TOL):
    """True where both Hopf coefficients vanish within tolerance."""
    with np.errstate(invalid="ignore"):
        return np.isfinite(fd.Q) & np.isfinite(fd.R) & \
            (np.abs(fd.Q) <= tol.umbilic) & (np.abs(fd.R) <= tol.umbilic)


def lawson_shift(h, kbar, c):
    """Parallel shift (H, kbar) -> (H + c, kbar - 2cH - c^2).

    The shifted pair satisfies the same curvature relation, which is the
    correspondence taking minimal surfaces in flat Minkowski 3-space
    (0, 0) to mean curvature 1 surfaces in the quadric (1, -1) at c = 1.
    """
    return (h + c, kbar - 2.0 * c * h - c * c)


def lawson_shift_residual(fd, c):
    """Curvature relation residual after shifting the shape operator.

    Shifts S -> S + c I and the ambient curvature to
    ktilde = kbar - c tr S - c^2, then returns |K - ktilde - det(S + cI)|,
    which vanishes wherever the unshifted relation K = kbar + det S holds.
    """
    s = fd.shape_op
    tr = s[..., 0, 0] + s[..., 1, 1]
    with np.errstate(invalid="ignore"):
        ktilde = fd.ambient.kbar - c * tr - c * c
        det_shift = (s[..., 0, 0] + c) * (s[..., 1, 1] + c) - s[..., 0, 1] * s[..., 1, 0]
        return np.abs(fd.K - ktilde - det_shift)


def _stat_max(a, where):
    sel = np.asarray(where) & np.isfinite(a)
    return float(np.max(np.abs(a[sel]))) if np.any(sel) else float("nan")


@dataclass
class GeometryReport:
    """Summary statistics of a FundamentalData measurement."""

    fd: FundamentalData
    assembly: str
    stats: dict

    def worst(self, tol=DEFAULT_TOL, target_h=None):
        """The residual gate: (ok, offender name, value, threshold)."""
        checks = [
            ("conf_u", self.stats["max_conf_u"], tol.conf),
            ("conf_v", self.stats["max_conf_v"], tol.conf),
            ("gauss_eq", self.stats["max_gauss_eq"], tol.gauss),
            ("sff", self.stats["max_sff"], tol.sff),
        ]
        if target_h is not None:
            checks.append(("mean_curvature", self.stats_h_error(target_h), tol.cmc))
        worst = None
        for name, value, bound in checks:
            ratio = value / bound if np.isfinite(value) else float("inf")
            if worst is None or ratio > worst[0]:
                worst = (ratio, name, value, bound)
        ratio, name, value, bound = worst
        return ratio <= 1.0, name, value, bound

    def stats_h_error(self, target_h):
        sel = self._core & np.isfinite(self.fd.H)
        if not np.any(sel):
            return float("nan")
        return float(np.max(np.abs(self.fd.H[sel] - target_h)))

    def to_dict(self):
        return dict(self.stats)


def geometry_report(surface, ambient=None, tol=DEFAULT_TOL, flip_normal=False):
    """Measure a surface and aggregate residual statistics.

    Statistics run over core points: valid interior points whose
    conformal factor clears the floor in the tolerance context, since
    curvature carries no meaning against a collapsing metric.
    """
    fd = fundamental_data(surface, ambient=ambient, tol=tol, flip_normal=flip_normal)
    core = fd.core(tol)
    h_vals = fd.H[core & np.isfinite(fd.H)]
    h_median = float(np.median(h_vals)) if h_vals.size else float("nan")
    umb = umbilic_detect(fd, tol)
    n_valid = int(np.sum(fd.valid()))
    stats = {
        "ambient": fd.ambient.name,
        "nu": len(fd.us), "nv": len(fd.vs), "hu": fd.hu, "hv": fd.hv,
        "n_valid": n_valid,
        "n_core": int(np.sum(core)),
        "n_degenerate": int(fd.mask[1:-1, 1:-1].sum()),
        "min_metric": float(np.nanmin(fd.metric)) if np.any(np.isfinite(fd.metric)) else float("nan"),
        "max_conf_u": _stat_max(fd.conf_u, core),
        "max_conf_v": _stat_max(fd.conf_v, core),
        "max_gauss_eq": _stat_max(fd.gauss_eq, core),
        "max_sff": _stat_max(fd.sff, core),
        "h_median": h_median,
        "h_spread": _stat_max(fd.H - h_median, core),
        "umbilic_fraction": float(np.sum(umb & core) / max(1, np.sum(core))),
    }
    report = GeometryReport(fd=fd, assembly=getattr(surface, "assembly", "unknown"), stats=stats)
    report._core = core
    return report
