"""Planar delta-tubes and delta-balls with incidence counting.

A tube is the closed delta-neighborhood (stadium) of a segment; an
incidence is a ball whose center lies in a tube.  Counting comes in two
flavors: a brute-force pass over every pair, and a grid engine that
buckets ball centers into square cells and rasterizes each tube over the
cells it can reach.  Both run the same distance predicate with the same
operation order, so their reports agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from shapely.geometry import LineString

from .errors import TooLargeError

# Relative padding on the closed containment predicate, so ties at the
# boundary do not depend on the order of arithmetic.
PREDICATE_REL_TOL = 1e-9

# Segments over x in [0, 4] with slopes up to 2 reach length 4*sqrt(5) < 10.
MAX_TUBE_LENGTH = 10.0

BRUTEFORCE_MAX_PAIRS = 10 ** 8
LATTICE_MAX_CELLS = 10 ** 9
AREA_ORACLE_MAX_TUBES = 32
GRID_SUBDIV = 2 ** 12

# The buffered-polygon area oracle resolves a stadium with 64 segments per
# quarter circle; its relative area error is ~1e-4, well under this slack.
AREA_RATIO_TOL = 1e-3


class DeltaBall(NamedTuple):
    """Closed ball; radius > 0 is the constructing caller's obligation."""

    center: tuple[float, float]
    radius: float


@dataclass(frozen=True)
class DeltaTube:
    """Closed delta-neighborhood of the segment p0-p1.

    slope/intercept are cached line parameters for a non-vertical segment
    (None for vertical ones).  Builders that know exact parameters pass
    them in; otherwise they are derived from the endpoints.
    """

    p0: tuple[float, float]
    p1: tuple[float, float]
    radius: float
    slope: float | None = None
    intercept: float | None = None

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.p0 == self.p1:
            raise ValueError("segment endpoints must differ")
        dx = self.p1[0] - self.p0[0]
        dy = self.p1[1] - self.p0[1]
        if math.hypot(dx, dy) > MAX_TUBE_LENGTH:
            raise ValueError(f"segment longer than {MAX_TUBE_LENGTH}")
        if self.slope is None and dx != 0.0:
            m = dy / dx
            object.__setattr__(self, "slope", m)
            object.__setattr__(self, "intercept", self.p0[1] - m * self.p0[0])

    @property
    def length(self) -> float:
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])


def tube_from_line(a_i: float, a_j: float, delta: float) -> DeltaTube:
    """Tube around y = a_j*(x - a_i) over 0 <= x <= 4.

    Slope and intercept are stored exactly as a_j and -a_j*a_i rather than
    recomputed from the endpoints.  Accepts values protruding half a grid
    step past [1, 2], which snapping can produce.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    pad = delta / 2
    for v in (a_i, a_j):
        if not 1.0 - pad <= v <= 2.0 + pad:
            raise ValueError(f"value {v!r} outside [1, 2] (plus snap padding)")
    return DeltaTube(
        p0=(0.0, -a_j * a_i),
        p1=(4.0, a_j * (4.0 - a_i)),
        radius=delta,
        slope=a_j,
        intercept=-a_j * a_i,
    )


def _dist2_to_segment(px: float, py: float, t: DeltaTube) -> float:
    # scalar twin of _hits_vector; keep the operation order identical
    x0, y0 = t.p0
    dx = t.p1[0] - x0
    dy = t.p1[1] - y0
    l2 = dx * dx + dy * dy
    wx = px - x0
    wy = py - y0
    s = (wx * dx + wy * dy) / l2
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    ex = wx - s * dx
    ey = wy - s * dy
    return ex * ex + ey * ey


def tube_contains(t: DeltaTube, p: tuple[float, float]) -> bool:
    """True iff p lies within radius*(1 + 1e-9) of the core segment."""
    rr = t.radius * (1.0 + PREDICATE_REL_TOL)
    return _dist2_to_segment(p[0], p[1], t) <= rr * rr


def _hits_vector(px: np.ndarray, py: np.ndarray, t: DeltaTube) -> np.ndarray:
    # vector twin of _dist2_to_segment + tube_contains
    x0, y0 = t.p0
    dx = t.p1[0] - x0
    dy = t.p1[1] - y0
    l2 = dx * dx + dy * dy
    wx = px - x0
    wy = py - y0
    s = (wx * dx + wy * dy) / l2
    np.clip(s, 0.0, 1.0, out=s)
    ex = wx - s * dx
    ey = wy - s * dy
    rr = t.radius * (1.0 + PREDICATE_REL_TOL)
    return ex * ex + ey * ey <= rr * rr


# ------------------------------------------------------------------ reports


@dataclass(frozen=True)
class RichnessHistogram:
    """Dyadic histogram: bins maps 2**i to the number of objects whose
    richness lies in [2**i, 2**(i+1)); richness-zero objects are unbinned."""

    bins: tuple[tuple[int, int], ...]
    total_incidences: int

    @classmethod
    def from_richness(cls, richness: Sequence[int]) -> "RichnessHistogram":
        counts: dict[int, int] = {}
        total = 0
        for v in richness:
            total += v
            if v >= 1:
                b = 1 << (int(v).bit_length() - 1)
                counts[b] = counts.get(b, 0) + 1
        return cls(bins=tuple(sorted(counts.items())), total_incidences=total)

    def count_at(self, r: int) -> int:
        for b, c in self.bins:
            if b == r:
                return c
        return 0


@dataclass(frozen=True)
class IncidenceReport:
    incidences: int
    per_tube_richness: tuple[int, ...]
    per_ball_richness: tuple[int, ...]
    tube_histogram: RichnessHistogram
    ball_histogram: RichnessHistogram

    def __post_init__(self) -> None:
        if sum(self.per_tube_richness) != self.incidences:
            raise ValueError("per-tube richness must sum to the incidence count")
        if sum(self.per_ball_richness) != self.incidences:
            raise ValueError("per-ball richness must sum to the incidence count")


def _assemble_report(
    per_tube: Sequence[int], per_ball: Sequence[int]
) -> IncidenceReport:
    return IncidenceReport(
        incidences=sum(per_tube),
        per_tube_richness=tuple(int(v) for v in per_tube),
        per_ball_richness=tuple(int(v) for v in per_ball),
        tube_histogram=RichnessHistogram.from_richness(per_tube),
        ball_histogram=RichnessHistogram.from_richness(per_ball),
    )


def rich_objects(report: IncidenceReport, r: int, side: str) -> int:
    """Number of tubes or balls whose richness falls in [r, 2r)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if side == "tubes":
        values = report.per_tube_richness
    elif side == "balls":
        values = report.per_ball_richness
    else:
        raise ValueError("side must be 'tubes' or 'balls'")
    return sum(1 for v in values if r <= v < 2 * r)


def serialize_incidence_report(
    report: IncidenceReport, delta: float, w: float
) -> str:
    """Structured text form: one header line, one line per dyadic bin."""
    lines = [
        f"tubes={len(report.per_tube_richness)} "
        f"balls={len(report.per_ball_richness)} "
        f"delta={delta!r} w={w!r} incidences={report.incidences}"
    ]
    peak = max(
        [b for b, _ in report.tube_histogram.bins]
        + [b for b, _ in report.ball_histogram.bins]
        + [1]
    )
    r = 1
    while r <= peak:
        lines.append(
            f"r={r} P_r_balls={report.ball_histogram.count_at(r)} "
            f"P_r_tubes={report.tube_histogram.count_at(r)}"
        )
        r *= 2
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------- counting


def count_incidences_bruteforce(
    ts: Sequence[DeltaTube], bs: Sequence[DeltaBall]
) -> IncidenceReport:
    """Reference engine: tests every (tube, ball) pair one by one."""
    if len(ts) * len(bs) > BRUTEFORCE_MAX_PAIRS:
        raise TooLargeError(
            f"{len(ts)}x{len(bs)} pairs exceed the {BRUTEFORCE_MAX_PAIRS} guard"
        )
    per_tube = [0] * len(ts)
    per_ball = [0] * len(bs)
    for i, t in enumerate(ts):
        rr = t.radius * (1.0 + PREDICATE_REL_TOL)
        rr2 = rr * rr
        hits = 0
        for j, b in enumerate(bs):
            if _dist2_to_segment(b.center[0], b.center[1], t) <= rr2:
                hits += 1
                per_ball[j] += 1
        per_tube[i] = hits
    return _assemble_report(per_tube, per_ball)


def count_incidences(
    ts: Sequence[DeltaTube], bs: Sequence[DeltaBall]
) -> IncidenceReport:
    """Grid engine; bit-identical to the brute-force reference.

    Ball centers go into square cells of side max(max radius, diam/4096);
    each tube visits only the cells inside its slab of columns and a
    conservative per-column y-window (one spare cell on each side soaks up
    all rounding), then runs the shared predicate on the candidates.
    """
    if not ts or not bs:
        return _assemble_report([0] * len(ts), [0] * len(bs))

    nb = len(bs)
    xs = np.fromiter((b.center[0] for b in bs), dtype=np.float64, count=nb)
    ys = np.fromiter((b.center[1] for b in bs), dtype=np.float64, count=nb)
    xmin = float(xs.min())
    ymin = float(ys.min())
    diam = math.hypot(float(xs.max()) - xmin, float(ys.max()) - ymin)
    rmax = max(t.radius for t in ts) * (1.0 + PREDICATE_REL_TOL)
    cell = max(rmax, diam / GRID_SUBDIV)

    ix = np.floor((xs - xmin) / cell).astype(np.int64)
    iy = np.floor((ys - ymin) / cell).astype(np.int64)
    nx = int(ix.max()) + 1
    ny = int(iy.max()) + 1
    keys = ix * ny + iy
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]

    per_tube = [0] * len(ts)
    per_ball = np.zeros(nb, dtype=np.int64)

    # hit ids are buffered and folded in with bincount, which beats
    # element-wise scattered adds by a wide margin at this volume
    pending: list[np.ndarray] = []
    pending_total = 0
    flush_at = 1 << 23

    def flush() -> None:
        nonlocal pending_total
        if pending:
            per_ball.__iadd__(np.bincount(np.concatenate(pending), minlength=nb))
            pending.clear()
            pending_total = 0

    for t_idx, t in enumerate(ts):
        x0, y0 = t.p0
        x1, y1 = t.p1
        rpad = t.radius * (1.0 + PREDICATE_REL_TOL)
        sxlo, sxhi = (x0, x1) if x0 <= x1 else (x1, x0)
        c0 = int(math.floor((sxlo - rpad - xmin) / cell)) - 1
        c1 = int(math.floor((sxhi + rpad - xmin) / cell)) + 1
        if c1 < 0 or c0 >= nx:
            continue
        c0 = max(c0, 0)
        c1 = min(c1, nx - 1)
        cols = np.arange(c0, c1 + 1, dtype=np.int64)

        if t.slope is None:
            ylo = np.full(cols.shape, min(y0, y1) - rpad)
            yhi = np.full(cols.shape, max(y0, y1) + rpad)
        else:
            m = t.slope
            # any center within rpad of the segment sits within
            # vr = rpad*sqrt(1+m^2) of the line's y-range over the column
            vr = rpad * math.sqrt(1.0 + m * m)
            lefts = xmin + cols * cell
            xa = np.clip(lefts, sxlo, sxhi)
            xb = np.clip(lefts + cell, sxlo, sxhi)
            ya = y0 + m * (xa - x0)
            yb = y0 + m * (xb - x0)
            ylo = np.minimum(ya, yb) - vr
            yhi = np.maximum(ya, yb) + vr

        r0 = np.clip(np.floor((ylo - ymin) / cell).astype(np.int64) - 1, 0, ny - 1)
        r1 = np.clip(np.floor((yhi - ymin) / cell).astype(np.int64) + 1, 0, ny - 1)
        starts = np.searchsorted(sorted_keys, cols * ny + r0, side="left")
        ends = np.searchsorted(sorted_keys, cols * ny + r1, side="right")
        counts = ends - starts
        total = int(counts.sum())
        if total == 0:
            continue
        before = np.cumsum(counts) - counts
        flat = (
            np.arange(total, dtype=np.int64)
            - np.repeat(before, counts)
            + np.repeat(starts, counts)
        )
        cand = order[flat]
        hits = _hits_vector(xs[cand], ys[cand], t)
        nh = int(hits.sum())
        if nh:
            per_tube[t_idx] = nh
            pending.append(cand[hits])
            pending_total += nh
            if pending_total >= flush_at:
                flush()

    flush()
    return _assemble_report(per_tube, per_ball.tolist())


# ------------------------------------------------- distinctness and spacing


def tube_overlap_ratio(t1: DeltaTube, t2: DeltaTube) -> float:
    """Intersection area over the smaller tube's area (buffered polygons)."""
    g1 = LineString([t1.p0, t1.p1]).buffer(t1.radius, quad_segs=64)
    g2 = LineString([t2.p0, t2.p1]).buffer(t2.radius, quad_segs=64)
    return g1.intersection(g2).area / min(g1.area, g2.area)


def essentially_distinct_tubes(
    ts: Sequence[DeltaTube],
) -> tuple[bool, tuple[int, int] | None]:
    """Check that no two tubes overlap in more than half a tube's area.

    A pair passes outright when slopes differ by >= delta/4 or intercepts
    by >= delta; pairs failing both margins go to the exact area oracle
    when the family has <= 32 tubes, and count as violations otherwise.
    Returns (ok, first violating pair by index).
    """
    n = len(ts)
    if n < 2:
        return True, None
    d = ts[0].radius
    for t in ts[1:]:
        if t.radius != d:
            raise ValueError("essential distinctness needs one common radius")

    finite = [i for i in range(n) if ts[i].slope is not None]
    vertical = [i for i in range(n) if ts[i].slope is None]

    candidates: list[tuple[int, int]] = []
    # vertical pairs: compare x positions; mixed pairs always pass
    for a_pos, i in enumerate(vertical):
        for j in vertical[a_pos + 1 :]:
            if abs(ts[i].p0[0] - ts[j].p0[0]) < d:
                candidates.append((i, j))

    finite.sort(key=lambda i: ts[i].slope)
    slopes = np.array([ts[i].slope for i in finite])
    inters = np.array([ts[i].intercept for i in finite])
    start = 0
    for k in range(1, len(finite)):
        while slopes[k] - slopes[start] >= d / 4:
            start += 1
        if start == k:
            continue
        close = np.nonzero(np.abs(inters[start:k] - inters[k]) < d)[0]
        for off in close:
            i, j = finite[start + off], finite[k]
            candidates.append((min(i, j), max(i, j)))

    for i, j in sorted(candidates):
        if n > AREA_ORACLE_MAX_TUBES:
            return False, (i, j)
        if tube_overlap_ratio(ts[i], ts[j]) > 0.5 + AREA_RATIO_TOL:
            return False, (i, j)
    return True, None


@dataclass(frozen=True)
class WellSpacingParams:
    """Cell side 1/w over (slope, intercept) space; occupancy cap per cell."""

    w: float
    max_per_cell: int = 1

    def __post_init__(self) -> None:
        if self.w < 1:
            raise ValueError("w must be >= 1 so cells are at most unit size")
        if self.max_per_cell < 1:
            raise ValueError("max_per_cell must be >= 1")


@dataclass(frozen=True)
class WellSpacingReport:
    max_occupancy: int
    occupied_cells: int
    passes: bool


def well_spaced_check(
    ts: Sequence[DeltaTube], params: WellSpacingParams
) -> WellSpacingReport:
    """Max tube count over (slope, intercept) cells of side 1/w."""
    if not ts:
        return WellSpacingReport(0, 0, True)
    if max(t.radius for t in ts) > 1.0 / params.w:
        raise ValueError("tube radius exceeds the cell side 1/w")
    cells: dict[tuple[int, int], int] = {}
    for t in ts:
        if t.slope is None:
            raise ValueError("well-spacing cells need non-vertical tubes")
        key = (math.floor(t.slope * params.w), math.floor(t.intercept * params.w))
        cells[key] = cells.get(key, 0) + 1
    peak = max(cells.values())
    return WellSpacingReport(
        max_occupancy=peak,
        occupied_cells=len(cells),
        passes=peak <= params.max_per_cell,
    )


# ------------------------------------------------------------------ lattice


def ball_lattice(
    region: tuple[float, float, float, float], delta: float
) -> list[DeltaBall]:
    """All delta-balls centered at (delta/2)-lattice points in the region.

    The region is a closed box (xmin, ymin, xmax, ymax); boundary points
    count (up to 1e-9 relative tolerance).
    """
    xmin, ymin, xmax, ymax = region
    if delta <= 0:
        raise ValueError("delta must be positive")
    if xmax < xmin or ymax < ymin:
        raise ValueError("region box is inverted")
    h = delta / 2.0
    if (xmax - xmin) * (ymax - ymin) / (h * h) > LATTICE_MAX_CELLS:
        raise TooLargeError("lattice would exceed the cell guard")
    tol = 1e-9 * max(1.0, abs(xmin), abs(xmax), abs(ymin), abs(ymax))
    i0 = math.ceil((xmin - tol) / h)
    i1 = math.floor((xmax + tol) / h)
    j0 = math.ceil((ymin - tol) / h)
    j1 = math.floor((ymax + tol) / h)
    return [
        DeltaBall((i * h, j * h), delta)
        for i in range(i0, i1 + 1)
        for j in range(j0, j1 + 1)
    ]
