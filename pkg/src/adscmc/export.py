"""Deterministic file formats: OBJ meshes, JSON grids, CSV reports.

Floats are printed with 17 significant digits, which round-trips
float64 exactly, and files always use "\\n" line endings, so identical
inputs produce identical bytes on every platform.  The JSON layout is

    {"schema": 1,
     "meta": {"domain": [u0, u1, v0, v1], "nu": .., "nv": ..,
              "ambient": "h31" | "e31", "assembly": ..},
     "vertices": [[..4 or 3 reals..], ..],   # row-major over the grid
     "mask": [true/false, ..],               # present when any point masked
     "report": {..}}                          # optional statistics

Quadric surfaces are stored with their four ambient components unless a
projection pole is requested; 3-space surfaces always store three.
"""

import json

import numpy as np

from .algebra import mat_of_vec, project_h31, vec_of_mat
from .nullcurves import SurfaceGridH31
from .weierstrass import SurfaceGridE31


def _fmt(x):
    return f"{float(x):.17g}"


def _emit(value, out):
    if isinstance(value, dict):
        out.append("{")
        for k, v in value.items():
            if out[-1] not in ("{",):
                out.append(",")
            out.append(json.dumps(k))
            out.append(":")
            _emit(v, out)
        out.append("}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        out.append("[")
        first = True
        for item in np.asarray(value).tolist() if isinstance(value, np.ndarray) else value:
            if not first:
                out.append(",")
            first = False
            _emit(item, out)
        out.append("]")
    elif isinstance(value, bool) or value is None:
        out.append(json.dumps(value))
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(_fmt(value) if np.isfinite(value) else json.dumps(None))
    else:
        out.append(json.dumps(str(value)))


def _dumps(value):
    out = []
    _emit(value, out)
    return "".join(out)


def _grid_vertices(surface, projection):
    """Row-major vertex array and effective mask for a surface grid."""
    pts = np.asarray(surface.points, dtype=float)
    if pts.ndim == 4:
        comps = vec_of_mat(pts)
        if projection is not None:
            comps = project_h31(comps, pole=projection, strict=False)
    else:
        if projection is not None:
            raise ValueError("projection applies only to quadric surfaces")
        comps = pts
    mask = np.asarray(surface.mask, dtype=bool) | ~np.isfinite(comps).all(axis=-1)
    return comps, mask


def export_obj(surface, projection, path):
    comps, mask = _grid_vertices(surface, projection)
    if comps.shape[-1] != 3:
        raise ValueError("OBJ output needs 3 coordinates; project the surface first")
    nu, nv = comps.shape[:2]
    filled = np.where(np.isfinite(comps), comps, 0.0)
    lines = []
    for i in range(nu):
        for j in range(nv):
            x, y, z = filled[i, j]
            lines.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
    for i in range(nu - 1):
        for j in range(nv - 1):
            if mask[i, j] or mask[i + 1, j] or mask[i + 1, j + 1] or mask[i, j + 1]:
                continue
            a = i * nv + j + 1
            b = (i + 1) * nv + j + 1
            c = (i + 1) * nv + j + 2
            d = i * nv + j + 2
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _meta(surface):
    us, vs = np.asarray(surface.us), np.asarray(surface.vs)
    ambient = "h31" if np.asarray(surface.points).ndim == 4 else "e31"
    return {"domain": [float(us[0]), float(us[-1]), float(vs[0]), float(vs[-1])],
            "nu": int(len(us)), "nv": int(len(vs)),
            "ambient": ambient, "assembly": str(surface.assembly)}


def export_json(surface, projection, path, report=None):
    comps, mask = _grid_vertices(surface, projection)
    meta = _meta(surface)
    if projection is not None:
        meta["projected"] = str(projection)
    doc = {"schema": 1, "meta": meta,
           "vertices": np.where(np.isfinite(comps), comps, 0.0)
           .reshape(-1, comps.shape[-1])}
    if mask.any():
        doc["mask"] = [bool(b) for b in mask.reshape(-1)]
    if report is not None:
        if hasattr(report, "to_dict"):
            report = report.to_dict()
        doc["report"] = report
    with open(path, "w", newline="\n") as fh:
        fh.write(_dumps(doc) + "\n")
    return path


def read_json(path):
    """Rebuild (surface, meta, report) from an exported JSON grid."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != 1:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    meta = doc["meta"]
    nu, nv = meta["nu"], meta["nv"]
    u0, u1, v0, v1 = meta["domain"]
    us = np.linspace(u0, u1, nu)
    vs = np.linspace(v0, v1, nv)
    verts = np.asarray(doc["vertices"], dtype=float)
    mask = np.asarray(doc.get("mask", [False] * (nu * nv)), dtype=bool).reshape(nu, nv)
    if meta["ambient"] == "h31" and "projected" not in meta:
        pts = mat_of_vec(verts.reshape(nu, nv, 4))
        surface = SurfaceGridH31(us=us, vs=vs, points=pts, mask=mask,
                                 assembly=meta.get("assembly", "mu"))
    else:
        surface = SurfaceGridE31(us=us, vs=vs, points=verts.reshape(nu, nv, -1),
                                 mask=mask, assembly=meta.get("assembly", "minimal"))
    return surface, meta, doc.get("report")


CSV_HEADER = "u,v,omega,H,Q,R,K,conf_u,conf_v,gauss_eq,sff"


def export_csv(fd, path):
    """One row per interior grid point of measured fundamental data."""
    cols = (fd.omega, fd.H, fd.Q, fd.R, fd.K,
            fd.conf_u, fd.conf_v, fd.gauss_eq, fd.sff)
    finite = np.isfinite(np.stack(cols)).all(axis=0) & fd.valid()
    lines = [CSV_HEADER]
    for i in range(len(fd.us)):
        for j in range(len(fd.vs)):
            if not finite[i, j]:
                continue
            row = [fd.us[i], fd.vs[j]] + [c[i, j] for c in cols]
            lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def export_surface(surface, projection, fmt, path, report=None, fd=None):
    """Write a surface grid in the requested format."""
    if fmt == "obj":
        return export_obj(surface, projection, path)
    if fmt == "json":
        return export_json(surface, projection, path, report=report)
    if fmt == "csv":
        if fd is None:
            raise ValueError("CSV export needs measured fundamental data")
        return export_csv(fd, path)
    raise ValueError(f"unknown format {fmt!r}; use obj, json, or csv")
