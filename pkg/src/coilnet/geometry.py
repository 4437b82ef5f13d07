"""Toroid cross-section synthesis and closed-form inductance optima.

A toroidal inductor wound from a fixed length l of wire with diameter d has
an optimal cross-section shape and turn count.  For a circular window the
optimum turn count is N = 0.8165 sqrt(l/d); the D-shaped window (straight
inner edge, profile integrated from the slope equation) carries roughly 15%
more inductance for the same wire length, with optimum radius ratio
r_o/r_i = 5.3 and N = 0.565 sqrt(l/d).

All lengths are meters, inductances henries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, DomainError

MU_0 = 4e-7 * math.pi  # vacuum permeability [H/m]

# Closed-form optimum constants for single-layer air-core toroids wound from
# wire length l of diameter d, turns packed against the inner radius.
CIRCULAR_TURNS_COEFF = 0.8165   # N_opt = 0.8165 sqrt(l/d)
CIRCULAR_L_COEFF = 0.2722       # leading coefficient of L_opt
DSHAPE_TURNS_COEFF = 0.565      # N_opt = 0.565 sqrt(l/d)
DSHAPE_L_COEFF = 0.314
DSHAPE_OPT_RATIO = 5.3          # optimal r_o/r_i for the D window

# Gauss-Legendre nodes/weights on [0, 1], used for per-interval cumulative
# integration of smooth integrands.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(7)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


@dataclass
class CrossSectionProfile:
    """Planar closed curve (r, z points) describing a toroid cross-section.

    ``points`` run once around the perimeter; the polygon closes by
    wrap-around from the last point back to the first (for the D shape that
    closing segment is the straight inner edge at r = r_i).  ``perimeter``
    and ``area`` are high-accuracy values computed at construction, not
    polygon sums over ``points``.
    """

    kind: str                 # "circular" | "d_shape"
    points: np.ndarray        # (m, 2) array of (r, z) [m]
    r_i: float
    r_o: float
    perimeter: float          # p0 [m]
    area: float               # A [m^2]
    flux_integral: float = field(repr=False, default=0.0)  # integral of dA/r over the window

    def __post_init__(self):
        if self.r_i <= 0 or self.r_o <= self.r_i:
            raise DomainError(
                f"invalid radii: need r_o > r_i > 0, got r_i={self.r_i}, r_o={self.r_o}"
            )
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 8:
            raise DomainError("profile needs an (m, 2) point array with m >= 8")
        self.points = pts

    @property
    def height(self) -> float:
        return float(self.points[:, 1].max() - self.points[:, 1].min())

    def polygon_area(self) -> float:
        """Shoelace area of the point polygon (closing edge implied)."""
        r = self.points[:, 0]
        z = self.points[:, 1]
        return 0.5 * abs(float(np.sum(r * np.roll(z, -1) - np.roll(r, -1) * z)))

    def polygon_perimeter(self) -> float:
        d = np.diff(self.points, axis=0, append=self.points[:1])
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    def symmetry_defect(self) -> float:
        """max |z(r) + z_mirror(r)| over the sampled upper/lower pairs."""
        z = self.points[:, 1]
        # profiles are built upper-then-lower with mirrored sampling
        upper = z[z >= 0]
        lower = z[z < 0]
        n = min(len(upper), len(lower))
        return float(np.max(np.abs(np.sort(upper)[:n] + np.sort(lower)[::-1][:n])))

    def scaled(self, c: float) -> "CrossSectionProfile":
        """Uniformly rescaled copy (r, z -> c*r, c*z)."""
        if c <= 0:
            raise DomainError("scale factor must be positive")
        return CrossSectionProfile(
            kind=self.kind,
            points=self.points * c,
            r_i=self.r_i * c,
            r_o=self.r_o * c,
            perimeter=self.perimeter * c,
            area=self.area * c * c,
            flux_integral=self.flux_integral * c,
        )


@dataclass
class ToroidSpec:
    """Winding-level description of a toroid built on a cross-section profile."""

    profile: CrossSectionProfile
    r_c: float                # center radius, (r_i + r_o)/2 for symmetric profiles
    turns: int
    wire_diameter: float
    wire_length: float        # l = N * p0 for a single layer

    def __post_init__(self):
        if self.turns < 1:
            raise DomainError(f"turn count must be >= 1, got {self.turns}")
        if self.wire_diameter <= 0:
            raise DomainError("wire diameter must be positive")
        if self.wire_length <= 0:
            raise DomainError("wire length must be positive")


def dshape_slope(r, r_i: float, r_o: float):
    """Slope dz/dr of the optimal D cross-section (upper-half branch).

    dz/dr = ln(sqrt(r_i r_o)/r) / sqrt(ln(r/r_i) ln(r_o/r)); diverges at both
    radii, changes sign at r = sqrt(r_i r_o).
    """
    if r_o <= r_i or r_i <= 0:
        raise DomainError(f"need r_o > r_i > 0, got r_i={r_i}, r_o={r_o}")
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= r_i) or np.any(arr >= r_o):
        raise DomainError(f"r must lie strictly inside ({r_i}, {r_o})")
    num = np.log(math.sqrt(r_i * r_o) / arr)
    den = np.sqrt(np.log(arr / r_i) * np.log(r_o / arr))
    out = num / den
    return float(out) if np.isscalar(r) else out


def _gl_cumulative(f, grid: np.ndarray) -> np.ndarray:
    """Cumulative integral of f along grid, 7-point Gauss-Legendre per interval."""
    a = grid[:-1]
    h = np.diff(grid)
    nodes = a[:, None] + h[:, None] * _GL_X[None, :]
    vals = (f(nodes) * _GL_W[None, :]).sum(axis=1) * h
    out = np.empty(len(grid))
    out[0] = 0.0
    np.cumsum(vals, out=out[1:])
    return out


def _dshape_halfcurve(r_i: float, r_o: float, n: int):
    """Upper-half D curve on a phi grid mapped as r = r_i exp(T(1-cos phi)/2).

    The substitution absorbs the inverse-square-root endpoint singularities
    of the slope equation: dz/dphi = (T/2) r(phi) cos(phi) is smooth and the
    arc length obeys ds/dphi = (T/2) r(phi) for the un-stretched curve.
    Returns (phi, r, z) with z(0) = half inner-edge height, z(pi) = 0.
    """
    T = math.log(r_o / r_i)
    phi = np.linspace(0.0, math.pi, n + 1)

    def rof(p):
        return r_i * np.exp(T * (1.0 - np.cos(p)) / 2.0)

    w = _gl_cumulative(lambda p: (T / 2.0) * rof(p) * np.cos(p), phi)
    z = w - w[-1]
    return phi, rof(phi), z


def dshape_profile(
    r_i: float,
    r_o: float,
    n_steps: int = 512,
    height: float | None = None,
) -> CrossSectionProfile:
    """Integrate the D-shape slope equation into a closed profile.

    Returns 2*n_steps + 1 points: the upper curve from the inner-top corner
    to (r_o, 0), then the mirrored lower curve back to the inner-bottom
    corner.  The straight inner edge at r = r_i closes the polygon.

    ``height`` optionally stretches z so the profile reaches a prescribed
    total height (built hardware deviates from the natural curve height).
    """
    if r_i <= 0 or r_o <= r_i:
        raise DomainError(f"need r_o > r_i > 0, got r_i={r_i}, r_o={r_o}")
    if n_steps < 16:
        raise DomainError(f"n_steps must be >= 16, got {n_steps}")

    sub = max(2, -(-4096 // n_steps))          # dense grid, multiple of n_steps
    n_dense = n_steps * sub
    phi, r, z = _dshape_halfcurve(r_i, r_o, n_dense)

    # quadrature error estimate on the total height, against a coarser level
    _, _, z_coarse = _dshape_halfcurve(r_i, r_o, n_dense // 2)
    h_fine = 2.0 * z.max()
    h_coarse = 2.0 * z_coarse.max()
    if abs(h_fine - h_coarse) > 1e-6 * abs(h_fine):
        raise AccuracyError(
            f"profile quadrature did not converge: dh/h = {abs(h_fine - h_coarse) / h_fine:.2e}"
        )

    stretch = 1.0
    if height is not None:
        if height <= 0:
            raise DomainError("target height must be positive")
        stretch = height / h_fine
        z = z * stretch

    # perimeter: two curved halves plus the straight inner edge
    T = math.log(r_o / r_i)

    def ds(p):
        rr = r_i * np.exp(T * (1.0 - np.cos(p)) / 2.0)
        return (T / 2.0) * rr * np.sqrt(np.sin(p) ** 2 + (stretch * np.cos(p)) ** 2)

    arc = _gl_cumulative(ds, phi)[-1]
    perimeter = 2.0 * arc + 2.0 * z[0]

    # area and flux integral from the dense polygon (upper + mirrored lower)
    r_poly = np.concatenate([r, r[::-1][1:]])
    z_poly = np.concatenate([z, -z[::-1][1:]])
    area = 0.5 * abs(float(np.sum(r_poly * np.roll(z_poly, -1) - np.roll(r_poly, -1) * z_poly)))
    flux = _polygon_flux_integral(r_poly, z_poly)

    idx = np.arange(0, n_dense + 1, sub)
    upper = np.column_stack([r[idx], z[idx]])
    lower = np.column_stack([r[idx][::-1][1:], -z[idx][::-1][1:]])
    points = np.vstack([upper, lower])

    return CrossSectionProfile(
        kind="d_shape",
        points=points,
        r_i=r_i,
        r_o=r_o,
        perimeter=perimeter,
        area=area,
        flux_integral=flux,
    )


def _polygon_flux_integral(r: np.ndarray, z: np.ndarray) -> float:
    """integral of (1/r) dA over a polygon, per-edge analytic (Green's theorem).

    Uses int int (1/r) dA = -closed int (z/r) dr with z linear on each edge.
    """
    r2 = np.roll(r, -1)
    z2 = np.roll(z, -1)
    dr = r2 - r
    dz = z2 - z
    out = np.zeros_like(r)
    flat = np.abs(dr) < 1e-15 * np.maximum(r, r2)
    ok = ~flat
    # z(r) = z1 + m (r - r1), m = dz/dr ->  int z/r dr = (z1 - m r1) ln(r2/r1) + m dr
    m = np.where(ok, dz / np.where(ok, dr, 1.0), 0.0)
    out[ok] = (z[ok] - m[ok] * r[ok]) * np.log(r2[ok] / r[ok]) + m[ok] * dr[ok]
    total = -float(np.sum(out))
    return abs(total)


def circular_profile(r_i: float, r_o: float, n_steps: int = 512) -> CrossSectionProfile:
    """Circular cross-section between r_i and r_o, sampled at 2*n_steps+1 points."""
    if r_i <= 0 or r_o <= r_i:
        raise DomainError(f"need r_o > r_i > 0, got r_i={r_i}, r_o={r_o}")
    if n_steps < 16:
        raise DomainError(f"n_steps must be >= 16, got {n_steps}")
    a = 0.5 * (r_o - r_i)
    r_c = 0.5 * (r_o + r_i)
    m = 2 * n_steps + 1
    th = 2.0 * math.pi * np.arange(m) / m
    points = np.column_stack([r_c + a * np.cos(th), a * np.sin(th)])
    flux = 2.0 * math.pi * (r_c - math.sqrt(r_c * r_c - a * a))
    return CrossSectionProfile(
        kind="circular",
        points=points,
        r_i=r_i,
        r_o=r_o,
        perimeter=2.0 * math.pi * a,
        area=math.pi * a * a,
        flux_integral=flux,
    )


def toroid_inductance_approx(spec: ToroidSpec) -> float:
    """Thin-toroid estimate mu0 N^2 A / (2 pi r_c)."""
    return MU_0 * spec.turns**2 * spec.profile.area / (2.0 * math.pi * spec.r_c)


def toroid_inductance_ideal(spec: ToroidSpec) -> float:
    """Ideal dense-winding toroid inductance mu0 N^2 / (2 pi) * integral dA/r.

    Exact for an azimuthally uniform surface current; for a circular window
    this equals mu0 N^2 (r_c - sqrt(r_c^2 - a^2)).
    """
    return MU_0 * spec.turns**2 * spec.profile.flux_integral / (2.0 * math.pi)


def _round_half_up(x: float) -> int:
    """Nearest integer, ties toward the larger value."""
    return int(math.floor(x + 0.5))


def packed_circular_toroid(l: float, d: float, turns: int, n_steps: int = 256) -> ToroidSpec:
    """Circular toroid wound from wire length l at a given turn count.

    Section radius follows from the per-turn perimeter (a = l / 2 pi N) and
    the inner radius from packing the N turns against it (N d = 2 pi r_i).
    """
    if l <= 0 or d <= 0 or turns < 1:
        raise DomainError("need positive l, d and turns >= 1")
    a = l / (2.0 * math.pi * turns)
    r_i = turns * d / (2.0 * math.pi)
    profile = circular_profile(r_i, r_i + 2.0 * a, n_steps)
    return ToroidSpec(profile=profile, r_c=r_i + a, turns=turns, wire_diameter=d, wire_length=l)


@lru_cache(maxsize=32)
def _unit_dshape(ratio: float, n_steps: int = 256) -> CrossSectionProfile:
    return dshape_profile(1.0, ratio, n_steps)


def packed_dshape_toroid(
    l: float, d: float, ratio: float, turns: int | None = None, n_steps: int = 256
) -> ToroidSpec:
    """D-shaped toroid of radius ratio r_o/r_i wound from wire length l.

    With turns unset, the count follows from winding the full length packed
    against the inner radius (N d = 2 pi r_i and N p0 = l); the wire length
    is honored exactly, the packing to within turn-count rounding.
    """
    if l <= 0 or d <= 0:
        raise DomainError("need positive l and d")
    if ratio <= 1.0:
        raise DomainError(f"radius ratio must exceed 1, got {ratio}")
    p_unit = _unit_dshape(ratio).perimeter
    if turns is None:
        turns = max(1, _round_half_up(math.sqrt(2.0 * math.pi * l / (d * p_unit))))
    r_i = l / (turns * p_unit)
    profile = dshape_profile(r_i, ratio * r_i, n_steps)
    return ToroidSpec(
        profile=profile,
        r_c=0.5 * (r_i + ratio * r_i),
        turns=turns,
        wire_diameter=d,
        wire_length=l,
    )


def optimal_circular_toroid(l: float, d: float) -> tuple[ToroidSpec, float]:
    """Loss-optimal circular toroid for wire length l, diameter d.

    Returns the spec (N = 0.8165 sqrt(l/d) rounded, section-to-inner radius
    ratio 1.5) and the closed-form optimal inductance
    (mu0 d / 2 pi)(0.2722 (l/d)^1.5 + 0.25 l/d).
    """
    _check_slenderness(l, d)
    s = l / d
    n = _round_half_up(CIRCULAR_TURNS_COEFF * math.sqrt(s))
    a = l / (2.0 * math.pi * n)
    r_i = a / 1.5
    profile = circular_profile(r_i, r_i + 2.0 * a, 256)
    spec = ToroidSpec(profile=profile, r_c=r_i + a, turns=n, wire_diameter=d, wire_length=l)
    inductance = (MU_0 * d / (2.0 * math.pi)) * (CIRCULAR_L_COEFF * s**1.5 + 0.25 * s)
    return spec, inductance


def optimal_dshape_toroid(l: float, d: float) -> tuple[ToroidSpec, float]:
    """Loss-optimal D-shaped toroid for wire length l, diameter d.

    Returns the spec (N = 0.565 sqrt(l/d) rounded, r_o/r_i = 5.3) and the
    closed-form optimum (mu0 d / 2 pi)(0.314 (l/d)^1.5 + 0.25 l/d).
    """
    _check_slenderness(l, d)
    s = l / d
    n = _round_half_up(DSHAPE_TURNS_COEFF * math.sqrt(s))
    spec = packed_dshape_toroid(l, d, DSHAPE_OPT_RATIO, turns=n)
    inductance = (MU_0 * d / (2.0 * math.pi)) * (DSHAPE_L_COEFF * s**1.5 + 0.25 * s)
    return spec, inductance


def _check_slenderness(l: float, d: float):
    if l <= 0 or d <= 0:
        raise DomainError("need positive l and d")
    if l / d <= 100:
        raise DomainError(
            f"optimum formulas assume many turns: need l/d > 100, got {l / d:.1f}"
        )


def write_profile_csv(profile: CrossSectionProfile, path) -> None:
    """Emit the profile points as CSV: header ``r_m,z_m``, 9 significant digits."""
    lines = ["r_m,z_m"]
    for r, z in profile.points:
        lines.append(f"{r:.8e},{z:.8e}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
