"""Filament-based quasi-static solver for winding inductances and fields.

Windings are thin current filaments (litz bundles collapse to their
centerline).  Self and mutual inductances come from Neumann double integrals
over polyline segment pairs — midpoint quadrature for well-separated pairs,
Gauss-Legendre for near pairs, and the geometric-mean-distance straight-wire
formula for each segment's own term.  Fields are Biot-Savart sums.

Parallel secondary segments are reduced through their full inductance matrix
(equal voltage across all segments, currents summed), which reproduces the
1/N_s^2 segmentation scaling for symmetric windings.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyError, DomainError, GeometryError
from .geometry import MU_0, CrossSectionProfile

ROLE_SECONDARY = "secondary_segment"
ROLE_PRIMARY = "primary"
ROLE_RETURN = "return_wire"
ROLE_DECOUPLING = "decoupling_loop"
_ROLES = (ROLE_SECONDARY, ROLE_PRIMARY, ROLE_RETURN, ROLE_DECOUPLING)

_CLOSED_TOL = 1e-12


@dataclass
class Filament:
    """One polyline of current, traversed in point order."""

    points: np.ndarray          # (n, 3) [m]
    wire_radius: float          # [m]
    role: str = ROLE_SECONDARY
    closed: bool = False        # terminal marker: open filaments end at circuit nodes

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or len(pts) < 2:
            raise GeometryError("filament needs an (n, 3) point array with n >= 2")
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(seg == 0.0):
            raise GeometryError("consecutive filament points must be distinct")
        if self.wire_radius <= 0:
            raise GeometryError("wire radius must be positive")
        if self.role not in _ROLES:
            raise GeometryError(f"unknown filament role {self.role!r}")
        end_gap = float(np.linalg.norm(pts[0] - pts[-1]))
        if self.closed and end_gap > _CLOSED_TOL:
            raise GeometryError(f"filament tagged closed but end gap is {end_gap:.3e} m")
        self.points = pts

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())


@dataclass
class WindingGeometry:
    """A set of filaments forming one electrical winding (or one side of one).

    ``parallel`` marks windings whose filaments are parallel branches between
    a shared terminal pair (segmented secondary); otherwise filaments are in
    series and carry the same current in point order.
    """

    filaments: list[Filament]
    parallel: bool = False
    profile: CrossSectionProfile | None = field(default=None, repr=False)
    symmetric: bool = False     # filaments are identical up to rotation about z

    def __post_init__(self):
        if not self.filaments:
            raise GeometryError("winding needs at least one filament")

    @property
    def bounding_radius(self) -> float:
        return max(float(np.linalg.norm(f.points, axis=1).max()) for f in self.filaments)

    def segments(self, role: str | None = None) -> list[Filament]:
        if role is None:
            return list(self.filaments)
        return [f for f in self.filaments if f.role == role]


@dataclass
class TwoPortParams:
    """Transformer identity card: Z = [R1 + jwL1, jwM; jwM, R2 + jwL2]."""

    L1: float
    L2: float
    M: float
    R1: float
    R2: float
    f: float

    def __post_init__(self):
        if self.L1 <= 0 or self.L2 <= 0:
            raise DomainError("L1 and L2 must be positive")
        if self.R1 < 0 or self.R2 < 0:
            raise DomainError("resistances must be non-negative")
        if self.M * self.M > self.L1 * self.L2 * (1.0 + 1e-12):
            raise DomainError(
                f"M^2 <= L1 L2 violated: k = {abs(self.M) / math.sqrt(self.L1 * self.L2):.6f}"
            )
        if self.f <= 0:
            raise DomainError("frequency must be positive")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.f


@dataclass
class CouplingSummary:
    """k, per-side coupling factors and turns ratio derived from a two-port."""

    k: float
    K1: float
    K2: float
    n: float


def coupling_summary(p: TwoPortParams) -> CouplingSummary:
    """k = M/sqrt(L1 L2), K1 = M/L1, K2 = M/L2, n = sqrt(L1/L2)."""
    return CouplingSummary(
        k=p.M / math.sqrt(p.L1 * p.L2),
        K1=p.M / p.L1,
        K2=p.M / p.L2,
        n=math.sqrt(p.L1 / p.L2),
    )


# ---------------------------------------------------------------------------
# Neumann integrals over polylines


def _pieces(points: np.ndarray, subdiv: int = 1):
    """Straight pieces of a polyline, each original segment split subdiv-fold."""
    p0 = points[:-1]
    dl = np.diff(points, axis=0)
    if subdiv > 1:
        t = np.arange(subdiv) / subdiv
        p0 = (p0[:, None, :] + t[None, :, None] * dl[:, None, :]).reshape(-1, 3)
        dl = np.repeat(dl / subdiv, subdiv, axis=0)
    return p0, dl


_GLN, _GLW = np.polynomial.legendre.leggauss(6)
_GLN = 0.5 * (_GLN + 1.0)
_GLW = 0.5 * _GLW


def _neumann_pair_sum(a0, adl, b0, bdl, exclude_diag=False, near_factor=3.0, chunk=512):
    """Sum of Neumann kernel over all piece pairs of two piece sets.

    Midpoint rule everywhere, then near pairs (midpoint distance below
    near_factor times the mean piece length) are re-evaluated with 6x6
    Gauss-Legendre quadrature.  Returns the raw double sum; multiply by
    mu0/4pi for henries.
    """
    am = a0 + 0.5 * adl
    bm = b0 + 0.5 * bdl
    la = np.linalg.norm(adl, axis=1)
    lb = np.linalg.norm(bdl, axis=1)

    total = 0.0
    near_i: list[np.ndarray] = []
    near_j: list[np.ndarray] = []
    for s in range(0, len(am), chunk):
        e = min(s + chunk, len(am))
        diff = am[s:e, None, :] - bm[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        dots = adl[s:e] @ bdl.T
        cut = near_factor * 0.5 * (la[s:e, None] + lb[None, :])
        mask = dist < cut
        if exclude_diag:
            idx = np.arange(s, e)
            mask[np.arange(e - s), idx] = True  # drop self pairs entirely here
        if mask.any():
            ii, jj = np.nonzero(mask)
            keep = np.ones_like(mask, dtype=bool)
            keep[ii, jj] = False
            total += float((dots * keep / np.where(dist == 0.0, np.inf, dist)).sum())
            if exclude_diag:
                off = ii + s != jj
                ii, jj = ii[off], jj[off]
            near_i.append(ii + s)
            near_j.append(jj)
        else:
            total += float((dots / dist).sum())

    if near_i:
        ii = np.concatenate(near_i)
        jj = np.concatenate(near_j)
        total += _neumann_gl_pairs(a0[ii], adl[ii], b0[jj], bdl[jj])
    return total


def _neumann_gl_pairs(a0, adl, b0, bdl):
    """6x6 Gauss-Legendre Neumann kernel for an explicit list of piece pairs."""
    if len(a0) == 0:
        return 0.0
    xa = a0[:, None, :] + _GLN[None, :, None] * adl[:, None, :]   # (P, G, 3)
    xb = b0[:, None, :] + _GLN[None, :, None] * bdl[:, None, :]
    diff = xa[:, :, None, :] - xb[:, None, :, :]                  # (P, G, G, 3)
    dist = np.sqrt(np.einsum("pghk,pghk->pgh", diff, diff))
    w2 = _GLW[:, None] * _GLW[None, :]
    dots = np.einsum("pk,pk->p", adl, bdl)
    return float(np.sum(dots * np.einsum("pgh,gh->p", 1.0 / dist, w2)))


def _segment_self_terms(dl: np.ndarray, r_eff: float) -> float:
    """GMD partial self-inductance sum of straight round-wire pieces (1/(mu0/4pi) units)."""
    length = np.linalg.norm(dl, axis=1)
    return float(np.sum(2.0 * length * (np.log(2.0 * length / r_eff) - 1.0)))


def _effective_radius(wire_radius: float, internal: bool) -> float:
    # e^{-1/4} GMD encodes the uniform-current internal flux; the bare radius
    # gives the external-only thin-filament value.
    return wire_radius * math.exp(-0.25) if internal else wire_radius


def _polyline_self(points: np.ndarray, wire_radius: float, subdiv: int, internal: bool) -> float:
    p0, dl = _pieces(points, subdiv)
    r_eff = _effective_radius(wire_radius, internal)
    raw = _neumann_pair_sum(p0, dl, p0, dl, exclude_diag=True)
    raw += _segment_self_terms(dl, r_eff)
    return MU_0 / (4.0 * math.pi) * raw


def _polyline_mutual(pa: np.ndarray, pb: np.ndarray, subdiv: int) -> float:
    a0, adl = _pieces(pa, subdiv)
    b0, bdl = _pieces(pb, subdiv)
    return MU_0 / (4.0 * math.pi) * _neumann_pair_sum(a0, adl, b0, bdl)


def _converge(evaluate, tol: float, max_levels: int = 4, floor: float = 1e-18):
    prev = evaluate(1)
    for level in range(1, max_levels + 1):
        cur = evaluate(2**level)
        if abs(cur - prev) <= tol * max(abs(cur), floor):
            return cur
        prev = cur
    raise AccuracyError(
        f"Neumann quadrature did not converge below {tol:.1e} after {max_levels} refinements"
    )


def neumann_mutual(a: Filament, b: Filament, tol: float = 1e-4) -> float:
    """Mutual inductance (mu0/4pi) closed-int closed-int dl_a . dl_b / |x_a - x_b|.

    Refines by splitting polyline segments until two successive levels agree
    to ``tol`` relative; raises AccuracyError otherwise.
    """
    if a is b:
        raise DomainError("mutual inductance needs two distinct filaments")
    _require_separation(a, b)
    return _converge(lambda s: _polyline_mutual(a.points, b.points, s), tol)


def self_inductance(
    a: Filament, wire_radius: float | None = None, tol: float = 1e-4, internal: bool = True
) -> float:
    """Self-inductance of one filament with GMD round-wire regularization.

    ``internal=True`` uses the e^{-1/4} effective radius (uniform current,
    thin-loop closed form mu0 r (ln(8r/a) - 7/4)); ``internal=False`` uses the
    bare radius (external-only form mu0 r (ln(8r/a) - 2)).
    """
    wr = a.wire_radius if wire_radius is None else wire_radius
    if wr <= 0:
        raise DomainError("wire radius must be positive")
    return _converge(lambda s: _polyline_self(a.points, wr, s, internal), tol)


def _require_separation(a: Filament, b: Filament):
    d = _min_distance(a.points, b.points)
    if d <= 0.0:
        raise GeometryError("filaments touch: minimum separation must be positive")


def _min_distance(pa: np.ndarray, pb: np.ndarray, chunk: int = 2048) -> float:
    best = np.inf
    for s in range(0, len(pa), chunk):
        diff = pa[s : s + chunk, None, :] - pb[None, :, :]
        d = np.einsum("ijk,ijk->ij", diff, diff)
        best = min(best, float(d.min()))
    return math.sqrt(max(best, 0.0))


def winding_inductance(
    w: WindingGeometry, tol: float | None = 1e-4, internal: bool = True
) -> float:
    """Series self-inductance of a winding: all filament selfs plus mutual pairs.

    ``tol=None`` evaluates once at the base quadrature without refinement
    (useful inside grid searches where only the trend matters).
    """
    def level(s):
        total = 0.0
        for f in w.filaments:
            total += _polyline_self(f.points, f.wire_radius, s, internal)
        for i in range(len(w.filaments)):
            for j in range(i + 1, len(w.filaments)):
                total += 2.0 * _polyline_mutual(w.filaments[i].points, w.filaments[j].points, s)
        return total

    if tol is None:
        return level(1)
    return _converge(level, tol)


def winding_mutual(a: WindingGeometry, b: WindingGeometry, tol: float = 1e-4) -> np.ndarray:
    """Mutual inductances between winding a (as one series circuit) and each
    filament branch of winding b.  Returns an array over b's filaments."""
    def level_for(fb, s):
        return sum(_polyline_mutual(fa.points, fb.points, s) for fa in a.filaments)

    return np.array([_converge(lambda s, f=fb: level_for(f, s), tol) for fb in b.filaments])


def parallel_reduction(L: np.ndarray, m: np.ndarray | None = None):
    """Composite inductance of parallel branches with inductance matrix L.

    Equal voltage across all branches, currents summed: L_eff = 1/(1^T L^-1 1).
    With a mutual vector m to an external circuit, the composite mutual is the
    branch-current-weighted average (m^T L^-1 1) / (1^T L^-1 1).
    """
    L = np.asarray(L, dtype=float)
    ones = np.ones(len(L))
    try:
        y = np.linalg.solve(L, ones)
    except np.linalg.LinAlgError as exc:
        raise GeometryError("singular segment inductance matrix (degenerate geometry)") from exc
    denom = float(ones @ y)
    if denom <= 0:
        raise GeometryError("non-passive segment inductance matrix")
    L_eff = 1.0 / denom
    if m is None:
        return L_eff
    m = np.asarray(m, dtype=float)
    return L_eff, float(m @ y) * L_eff


def secondary_inductance_matrix(
    secondary: WindingGeometry, tol: float = 1e-4, internal: bool = True
) -> np.ndarray:
    """Full N_s x N_s partial-inductance matrix of the secondary segments."""
    segs = secondary.filaments
    n = len(segs)

    def level(s):
        mat = np.empty((n, n))
        if secondary.symmetric:
            # circulant: row 0 fixes the whole matrix
            row = np.empty(n)
            row[0] = _polyline_self(segs[0].points, segs[0].wire_radius, s, internal)
            for j in range(1, n):
                row[j] = _polyline_mutual(segs[0].points, segs[j].points, s)
            row = _symmetrize_circulant(row)
            for i in range(n):
                mat[i] = np.roll(row, i)
        else:
            for i in range(n):
                mat[i, i] = _polyline_self(segs[i].points, segs[i].wire_radius, s, internal)
                for j in range(i + 1, n):
                    mat[i, j] = mat[j, i] = _polyline_mutual(segs[i].points, segs[j].points, s)
        return mat

    prev = level(1)
    for lv in (2, 4):
        cur = level(lv)
        if np.max(np.abs(cur - prev)) <= tol * np.max(np.abs(cur)):
            return cur
        prev = cur
    raise AccuracyError("segment inductance matrix did not converge")


def _symmetrize_circulant(row: np.ndarray) -> np.ndarray:
    # M(seg0, seg_j) must equal M(seg0, seg_{n-j}) for rotationally symmetric
    # segments; average out quadrature asymmetry.
    n = len(row)
    out = row.copy()
    for j in range(1, n):
        out[j] = out[n - j] = 0.5 * (row[j] + row[n - j])
    return out


def two_port(
    primary: WindingGeometry,
    secondary: WindingGeometry,
    f: float,
    r1: float,
    r2: float,
    tol: float = 1e-4,
    internal: bool = True,
) -> TwoPortParams:
    """Assemble the transformer two-port from filament geometry.

    L1 is the series inductance of the primary winding.  A segmented
    secondary is reduced through its full segment matrix; its composite
    mutual to the primary weights each segment by its parallel current
    share.  Resistances are inputs (DC values; AC losses are out of scope).
    """
    if f <= 0:
        raise DomainError("frequency must be positive")
    L1 = winding_inductance(primary, tol, internal)
    if secondary.parallel and len(secondary.filaments) > 1:
        L_mat = secondary_inductance_matrix(secondary, tol, internal)
        m_vec = winding_mutual(primary, secondary, tol)
        L2, M = parallel_reduction(L_mat, m_vec)
    else:
        L2 = winding_inductance(secondary, tol, internal)
        M = float(winding_mutual(primary, secondary, tol).sum())
    return TwoPortParams(L1=L1, L2=L2, M=abs(M), R1=r1, R2=r2, f=f)


def segmentation_scaling(base: TwoPortParams, n_s: int) -> TwoPortParams:
    """Predicted two-port after splitting the secondary into n_s parallel segments.

    L2 and R2 scale with 1/n_s^2 (series split times parallel combination),
    leaving Q2 = wL2/R2 invariant.  M follows the turns-ratio shift as 1/n_s;
    this is a modeling assumption validated numerically, not a closed form.
    """
    if n_s < 1:
        raise DomainError("segment count must be >= 1")
    return TwoPortParams(
        L1=base.L1,
        L2=base.L2 / n_s**2,
        M=base.M / n_s,
        R1=base.R1,
        R2=base.R2 / n_s**2,
        f=base.f,
    )


# ---------------------------------------------------------------------------
# Winding generators


def _closed_curve_interp(points: np.ndarray):
    """Arc-length parametrization t in [0, 1) -> point on a closed (r, z) curve."""
    pts = points
    d = np.linalg.norm(np.diff(pts, axis=0, append=pts[:1]), axis=1)
    s = np.concatenate([[0.0], np.cumsum(d)])
    total = s[-1]
    rr = np.concatenate([pts[:, 0], pts[:1, 0]])
    zz = np.concatenate([pts[:, 1], pts[:1, 1]])

    def at(t):
        u = (np.asarray(t, dtype=float) % 1.0) * total
        return np.interp(u, s, rr), np.interp(u, s, zz)

    return at


def _offset_profile(profile: CrossSectionProfile, offset: float) -> np.ndarray:
    """Profile points displaced along the outward normal by ``offset``."""
    pts = profile.points
    if offset == 0.0:
        return pts.copy()
    nxt = np.roll(pts, -1, axis=0)
    prv = np.roll(pts, 1, axis=0)
    tang = nxt - prv
    tang /= np.linalg.norm(tang, axis=1, keepdims=True)
    # outward normal for a clockwise-ordered (upper-then-lower) profile
    normal = np.column_stack([tang[:, 1], -tang[:, 0]])
    center = pts.mean(axis=0)
    flip = np.einsum("ij,ij->i", normal, pts - center) < 0
    normal[flip] *= -1.0
    return pts + offset * normal


def _place(r: np.ndarray, z: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), z])


def generate_secondary_toroid(
    profile: CrossSectionProfile,
    r_placement: float = 0.0,
    turns_per_segment: int = 36,
    segments: int = 1,
    layers: int = 1,
    wire_radius: float = 8e-4,
    points_per_turn: int = 64,
    check_collision: bool = True,
) -> WindingGeometry:
    """Segmented toroidal winding following the cross-section profile.

    ``segments`` rotationally symmetric sectors are produced, each a single
    open polyline carrying ``turns_per_segment`` helical turns per layer plus
    straight lead wires to shared node points near the axis (top in, bottom
    out).  ``segments == 1`` yields one closed toroidal helix without leads.
    ``r_placement`` offsets the wire path outward from the core profile;
    additional layers stack outward by one wire diameter.
    """
    if segments < 1 or turns_per_segment < 1 or layers < 1:
        raise DomainError("segments, turns_per_segment and layers must be >= 1")
    if points_per_turn < 16:
        raise DomainError("need at least 16 points per turn")

    sector = 2.0 * math.pi / segments
    pitch = sector / turns_per_segment
    # segment paths stop half a turn pitch short of the sector boundaries so
    # adjacent segments clear each other where the wire exits to the plates
    gap = 0.0 if segments == 1 else 0.5 * pitch
    filaments = []
    z_node = profile.points[:, 1].max()
    r_node = 0.5 * profile.r_i

    for s in range(segments):
        theta0 = s * sector
        parts = []
        for layer in range(layers):
            offs = r_placement + 2.0 * wire_radius * layer
            curve = _closed_curve_interp(_offset_profile(profile, offs))
            n_pts = turns_per_segment * points_per_turn
            t = np.arange(n_pts + 1) / points_per_turn   # poloidal turns
            theta = theta0 + gap + (sector - 2.0 * gap) * t / turns_per_segment
            rr, zz = curve(t)
            pts = _place(rr, zz, theta)
            parts.append(pts)
        path = parts[0]
        for extra in parts[1:]:
            path = np.vstack([path, extra])

        if segments == 1 and layers == 1:
            path = np.vstack([path[:-1], path[:1]])  # exact closure of the torus knot
            filaments.append(Filament(path, wire_radius, ROLE_SECONDARY, closed=True))
            continue

        theta_a = theta0 + gap
        theta_b = theta0 + sector - gap
        start = path[0]
        end = path[-1]
        lead_in = np.array([[r_node * math.cos(theta_a), r_node * math.sin(theta_a), z_node]])
        # run down the inner edge, then radially in to the bottom node
        drop = np.array([[end[0], end[1], -start[2]]])
        lead_out = np.array([[r_node * math.cos(theta_b), r_node * math.sin(theta_b), -z_node]])
        path = np.vstack([lead_in, path, drop, lead_out])
        filaments.append(Filament(path, wire_radius, ROLE_SECONDARY, closed=False))

    winding = WindingGeometry(
        filaments=filaments,
        parallel=segments > 1,
        profile=profile,
        symmetric=True,
    )
    if check_collision:
        _report_collisions(winding)
    return winding


def generate_primary(
    style: str,
    turns: int,
    host: WindingGeometry,
    with_return_wire: bool = False,
    return_radius: float | None = None,
    standoff: float | None = None,
    wire_radius: float = 6e-4,
    points_per_turn: int = 64,
    check_collision: bool = True,
) -> WindingGeometry:
    """Primary winding around an existing secondary toroid.

    ``sparse_helical_toroid`` spreads the turns helically over the full
    azimuth on an enlarged copy of the host profile (closed torus knot);
    ``dense_localized`` stacks all turns at one azimuthal station.  The
    optional return wire is a circle at ``return_radius`` in the midplane
    carrying the counter-current (reversed traversal), cancelling the single
    net azimuthal turn of the helix.
    """
    if style not in ("sparse_helical_toroid", "dense_localized"):
        raise DomainError(f"unknown primary style {style!r}")
    if turns < 1:
        raise DomainError("primary needs at least one turn")
    if host.profile is None:
        raise GeometryError("host winding carries no cross-section profile")

    host_wr = max(f.wire_radius for f in host.filaments)
    if standoff is None:
        standoff = 2.0 * host_wr + 2.0 * wire_radius
    curve = _closed_curve_interp(_offset_profile(host.profile, standoff))

    filaments = []
    if style == "sparse_helical_toroid":
        n_pts = turns * points_per_turn
        t = np.arange(n_pts) / points_per_turn          # poloidal turns
        theta = 2.0 * math.pi * t / turns               # full azimuth once
        rr, zz = curve(t)
        pts = _place(rr, zz, theta)
        pts = np.vstack([pts, pts[:1]])
        filaments.append(Filament(pts, wire_radius, ROLE_PRIMARY, closed=True))
    else:
        # stacked profile loops at adjacent azimuthal stations
        r_mid = 0.5 * (host.profile.r_i + host.profile.r_o)
        pitch = 4.0 * wire_radius / r_mid
        t = np.arange(points_per_turn) / points_per_turn
        for j in range(turns):
            theta = np.full(points_per_turn, j * pitch)
            rr, zz = curve(t)
            pts = _place(rr, zz, theta)
            pts = np.vstack([pts, pts[:1]])
            filaments.append(Filament(pts, wire_radius, ROLE_PRIMARY, closed=True))

    if with_return_wire:
        if return_radius is None:
            return_radius = host.profile.r_o + standoff + 4.0 * wire_radius
        if return_radius <= host.profile.r_o:
            raise GeometryError("return wire must run outside the toroid outer radius")
        n_ret = 256
        th = -2.0 * math.pi * np.arange(n_ret) / n_ret   # reversed traversal
        pts = np.column_stack(
            [return_radius * np.cos(th), return_radius * np.sin(th), np.zeros(n_ret)]
        )
        pts = np.vstack([pts, pts[:1]])
        filaments.append(Filament(pts, wire_radius, ROLE_RETURN, closed=True))

    winding = WindingGeometry(filaments=filaments, parallel=False, profile=host.profile)
    if check_collision:
        _report_collisions(winding, host)
    return winding


def _report_collisions(winding: WindingGeometry, other: WindingGeometry | None = None):
    """Raise GeometryError when filament paths come closer than both wire radii."""
    fils = list(winding.filaments)
    others = list(other.filaments) if other is not None else []
    for i, fa in enumerate(fils):
        for fb in fils[i + 1 :]:
            d = _min_distance(fa.points, fb.points)
            if d < fa.wire_radius + fb.wire_radius:
                raise GeometryError(
                    f"winding collision: filament distance {d:.4e} m underruns "
                    f"wire radii {fa.wire_radius + fb.wire_radius:.4e} m"
                )
        for fb in others:
            d = _min_distance(fa.points, fb.points)
            if d < fa.wire_radius + fb.wire_radius:
                raise GeometryError(
                    f"collision with host winding: distance {d:.4e} m underruns "
                    f"wire radii {fa.wire_radius + fb.wire_radius:.4e} m"
                )


# ---------------------------------------------------------------------------
# Fields


def field_at(points, winding: WindingGeometry | Filament, current: float, chunk: int = 1024):
    """Biot-Savart field of a winding at the given points, tesla vectors.

    All filaments of the winding carry ``current`` in point order (series
    convention); for parallel-segmented windings pass the per-segment share.
    Raises GeometryError when a probe point sits within a wire radius of a
    filament.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    fils = [winding] if isinstance(winding, Filament) else winding.filaments
    B = np.zeros_like(pts)
    for f in fils:
        p0, dl = _pieces(f.points)
        mid = p0 + 0.5 * dl
        for s in range(0, len(pts), chunk):
            diff = pts[s : s + chunk, None, :] - mid[None, :, :]
            dist2 = np.einsum("ijk,ijk->ij", diff, diff)
            dmin = math.sqrt(float(dist2.min()))
            if dmin < f.wire_radius:
                raise GeometryError(
                    f"field point within wire radius of a filament ({dmin:.3e} m)"
                )
            cross = np.cross(np.broadcast_to(dl[None, :, :], diff.shape), diff, axis=2)
            B[s : s + chunk] += np.einsum("ijk,ij->ik", cross, dist2**-1.5)
    return MU_0 * current / (4.0 * math.pi) * B


def fibonacci_sphere(n: int, radius: float) -> np.ndarray:
    """Quasi-uniform spherical sampling (Fibonacci lattice)."""
    i = np.arange(n) + 0.5
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    cos_t = 1.0 - 2.0 * i / n
    sin_t = np.sqrt(1.0 - cos_t**2)
    return radius * np.column_stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t])


def stray_field_metric(
    winding: WindingGeometry,
    current: float,
    radius: float | None = None,
    n_points: int = 242,
) -> float:
    """RMS |B| over a quasi-uniform probe sphere (default 242 points at twice
    the winding bounding radius)."""
    if current == 0.0:
        return 0.0
    r_bound = winding.bounding_radius
    if radius is None:
        radius = 2.0 * r_bound
    if radius <= r_bound:
        raise DomainError("probe sphere must lie outside the winding bounding radius")
    pts = fibonacci_sphere(n_points, radius)
    B = field_at(pts, winding, current)
    return float(np.sqrt(np.mean(np.einsum("ij,ij->i", B, B))))


# ---------------------------------------------------------------------------
# I/O


def winding_to_json(w: WindingGeometry) -> str:
    data = {
        "parallel": w.parallel,
        "symmetric": w.symmetric,
        "filaments": [
            {
                "role": f.role,
                "wire_radius_m": f.wire_radius,
                "closed": f.closed,
                "points_m": [[float(x), float(y), float(z)] for x, y, z in f.points],
            }
            for f in w.filaments
        ],
    }
    return json.dumps(data, indent=2)


def winding_from_json(text: str) -> WindingGeometry:
    data = json.loads(text)
    fils = [
        Filament(
            points=np.asarray(f["points_m"], dtype=float),
            wire_radius=float(f["wire_radius_m"]),
            role=f.get("role", ROLE_SECONDARY),
            closed=bool(f.get("closed", False)),
        )
        for f in data["filaments"]
    ]
    return WindingGeometry(
        filaments=fils,
        parallel=bool(data.get("parallel", False)),
        symmetric=bool(data.get("symmetric", False)),
    )


def write_field_map_csv(path, points: np.ndarray, B: np.ndarray) -> None:
    """CSV field map: ``x_m,y_m,z_m,Bx_T,By_T,Bz_T``, 9 significant digits."""
    lines = ["x_m,y_m,z_m,Bx_T,By_T,Bz_T"]
    for (x, y, z), (bx, by, bz) in zip(points, B):
        lines.append(f"{x:.8e},{y:.8e},{z:.8e},{bx:.8e},{by:.8e},{bz:.8e}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
