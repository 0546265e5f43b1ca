"""One-dimensional set machinery: well-spaced generators, grid snapping,
sumsets and productsets, and exact covering numbers at a scale delta.

Generated sets live in [1, 2]; their sumsets live in [2, 4] and productsets
in [1, 4].  Everything here is pure and deterministic given its arguments.

Floating point policy: all separation comparisons run through one comparator
that grants a few ulps of absolute slack, so spacings that are exact on a
delta-grid survive rounding.  Experiments keep delta >= 1e-9, six orders of
magnitude above that noise floor, so the slack is never observable at scale.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import SnapWouldMergeError, TooLargeError

# Absolute slack granted by the separation comparator, scaled by the largest
# magnitude in play.  32 ulps at magnitude 1.
_ULP_SLACK = 32 * 2.220446049250313e-16

ORACLE_MAX_VALUES = 20


def _slack(values: Sequence[float]) -> float:
    scale = 1.0
    for v in values:
        a = abs(v)
        if a > scale:
            scale = a
    return _ULP_SLACK * scale


def separation_threshold(values: Sequence[float], delta: float) -> float:
    """Effective gap threshold for delta-separation over these values."""
    return max(delta - _slack(values), 0.0)


@dataclass(frozen=True)
class ValueList:
    """Sorted tuple of floats with exact duplicates removed."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        for a, b in zip(self.values, self.values[1:]):
            if not a < b:
                raise ValueError("ValueList values must be strictly increasing")

    @classmethod
    def from_iterable(cls, vals: Iterable[float]) -> "ValueList":
        return cls(tuple(sorted(set(float(v) for v in vals))))

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Scale:
    """Discretization scale delta = n**-alpha with the slack exponent used
    when comparing measured exponents against target ones."""

    n: int
    alpha: float
    delta: float
    fit_eps: float = 0.1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1.0 < self.alpha <= 1.5:
            raise ValueError("alpha must lie in (1, 3/2]")
        if self.delta != float(self.n) ** (-self.alpha):
            raise ValueError("delta must equal n**-alpha as computed")
        if self.fit_eps <= 0:
            raise ValueError("fit_eps must be positive")

    @classmethod
    def from_alpha(cls, n: int, alpha: float, fit_eps: float = 0.1) -> "Scale":
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls(n=n, alpha=alpha, delta=float(n) ** (-alpha), fit_eps=fit_eps)

    def admits(self, a: "SeparatedSet") -> bool:
        """A set is admissible at this scale when delta sits below its gap."""
        return self.delta < a.min_gap


@dataclass(frozen=True)
class SeparatedSet:
    """Sorted, well-separated points in [1, 2].

    min_gap is the exact minimum of consecutive differences (inf for a
    singleton).  on_grid_delta, when set, certifies that every value is an
    integer multiple of that grid step; snapped sets may protrude up to half
    a step past the interval ends.
    """

    values: tuple[float, ...]
    n: int
    min_gap: float
    on_grid_delta: float | None = None

    def __post_init__(self) -> None:
        if self.n != len(self.values) or self.n < 1:
            raise ValueError("n must match the number of values")
        pad = 0.0 if self.on_grid_delta is None else self.on_grid_delta / 2
        lo, hi = 1.0 - pad, 2.0 + pad
        for v in self.values:
            if not lo <= v <= hi:
                raise ValueError(f"value {v!r} outside [{lo}, {hi}]")
        gap = math.inf
        for a, b in zip(self.values, self.values[1:]):
            if not a < b:
                raise ValueError("values must be strictly increasing")
            gap = min(gap, b - a)
        if self.min_gap != gap:
            raise ValueError("min_gap must equal the minimum consecutive difference")
        if self.on_grid_delta is not None and self.on_grid_delta <= 0:
            raise ValueError("on_grid_delta must be positive")

    @classmethod
    def from_values(
        cls, values: Iterable[float], on_grid_delta: float | None = None
    ) -> "SeparatedSet":
        vals = tuple(float(v) for v in values)
        gap = math.inf
        for a, b in zip(vals, vals[1:]):
            gap = min(gap, b - a)
        return cls(values=vals, n=len(vals), min_gap=gap, on_grid_delta=on_grid_delta)

    def grid_indices(self) -> tuple[int, ...] | None:
        """Integer grid coordinates if the set is exactly on its grid.

        Returns None when on_grid_delta is unset or some value strays more
        than one ulp from its nearest multiple (a declared-but-approximate
        certificate, which the worked examples allow).
        """
        d = self.on_grid_delta
        if d is None:
            return None
        ks = []
        for v in self.values:
            k = round(v / d)
            if abs(v - k * d) > math.ulp(max(1.0, abs(v))):
                return None
            ks.append(k)
        return tuple(ks)


def make_ap(n: int) -> SeparatedSet:
    """Arithmetic progression {1 + i/n : 1 <= i <= n} with gap 1/n."""
    if n < 2:
        raise ValueError("make_ap needs n >= 2")
    return SeparatedSet.from_values(1.0 + i / n for i in range(1, n + 1))


def make_gp(n: int, q: float) -> ValueList:
    """Geometric progression {q**i : 1 <= i <= n} for a ratio q > 1."""
    if n < 1:
        raise ValueError("make_gp needs n >= 1")
    if q <= 1.0:
        raise ValueError("make_gp needs q > 1")
    return ValueList.from_iterable(q**i for i in range(1, n + 1))


def make_jittered(n: int, jitter: float, seed: int) -> SeparatedSet:
    """AP with each point moved by u_i*jitter/n, u_i uniform in [-1, 1].

    Deterministic in seed.  jitter < 1/2 keeps the order, so
    min_gap >= (1 - 2*jitter)/n.  The top point is clamped to 2.0, the one
    index whose jitter could leave the interval.
    """
    if n < 2:
        raise ValueError("make_jittered needs n >= 2")
    if not 0.0 <= jitter < 0.5:
        raise ValueError("jitter must lie in [0, 1/2)")
    rng = random.Random(seed)
    us = [rng.uniform(-1.0, 1.0) for _ in range(n)]
    values = [1.0 + (i + u * jitter) / n for i, u in zip(range(1, n + 1), us)]
    values[-1] = min(values[-1], 2.0)
    return SeparatedSet.from_values(values)


def snap_to_grid(a: SeparatedSet, delta: float) -> SeparatedSet:
    """Snap every value to its nearest multiple of delta (ties toward the
    smaller multiple).

    Injective whenever delta < min_gap; guaranteed to keep even the gap
    structure when delta <= min_gap/4.  Raises SnapWouldMergeError if two
    values would land on the same grid point.  Every output moves by at
    most delta/2.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    snapped = [math.ceil(v / delta - 0.5) * delta for v in a.values]
    for x, y in zip(snapped, snapped[1:]):
        if x == y:
            raise SnapWouldMergeError(
                f"delta={delta!r} too coarse for min_gap={a.min_gap!r}: "
                "two values share a grid point"
            )
    return SeparatedSet.from_values(snapped, on_grid_delta=delta)


def _values_and_grid(
    a: SeparatedSet | ValueList,
) -> tuple[tuple[float, ...], float | None, tuple[int, ...] | None]:
    if isinstance(a, SeparatedSet):
        ks = a.grid_indices()
        return a.values, a.on_grid_delta, ks
    return a.values, None, None


def sumset(a: SeparatedSet | ValueList) -> ValueList:
    """All pairwise sums x + y over unordered pairs, repeats included.

    Exactly on-grid sets combine through integer grid coordinates so that
    distinct sums stay exactly one grid step apart.
    """
    values, delta, ks = _values_and_grid(a)
    if ks is not None:
        assert delta is not None
        out = {ki + kj for i, ki in enumerate(ks) for kj in ks[i:]}
        return ValueList(tuple(k * delta for k in sorted(out)))
    out = {x + y for i, x in enumerate(values) for y in values[i:]}
    return ValueList(tuple(sorted(out)))


def productset(a: SeparatedSet | ValueList) -> ValueList:
    """All pairwise products x*y over unordered pairs, repeats included."""
    values, delta, ks = _values_and_grid(a)
    if ks is not None:
        assert delta is not None
        d2 = delta * delta
        out = {ki * kj for i, ki in enumerate(ks) for kj in ks[i:]}
        return ValueList(tuple(k * d2 for k in sorted(out)))
    out = {x * y for i, x in enumerate(values) for y in values[i:]}
    return ValueList(tuple(sorted(out)))


def covering_witness(values: Sequence[float], delta: float) -> list[float]:
    """Greedy left-to-right maximal delta-separated subset of sorted values.

    In one dimension the greedy sweep is optimal, so its size is the
    covering number; every skipped value sits within delta of the witness
    kept just before it.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not values:
        return []
    thr = separation_threshold(values, delta)
    out = [values[0]]
    for v in values[1:]:
        if v - out[-1] >= thr:
            out.append(v)
    return out


def covering_number(values: Sequence[float], delta: float) -> int:
    """Max cardinality of a delta-separated subset (values sorted ascending)."""
    return len(covering_witness(values, delta))


def covering_number_oracle(values: Sequence[float], delta: float) -> int:
    """Exhaustive maximum of the delta-separated predicate over all subsets.

    Independent of the greedy sweep; branches over take/skip decisions and
    prunes only branches that provably cannot beat the current best.
    Guarded to len(values) <= 20.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    n = len(values)
    if n > ORACLE_MAX_VALUES:
        raise TooLargeError(f"oracle enumerates subsets; {n} > {ORACLE_MAX_VALUES}")
    thr = separation_threshold(values, delta)
    best = 0

    def walk(i: int, last: float | None, size: int) -> None:
        nonlocal best
        if size + (n - i) <= best:
            return
        if i == n:
            return
        v = values[i]
        if last is None or v - last >= thr:
            if size + 1 > best:
                best = size + 1
            walk(i + 1, v, size + 1)
        walk(i + 1, last, size)

    walk(0, None, 0)
    return best


def save_values(path: str, obj: SeparatedSet | ValueList) -> None:
    """Write one decimal value per line under a '# n=<N> delta=<d>' header.

    delta records on_grid_delta; 0 means the values carry no grid
    certificate.  repr keeps every value exact across a round trip.
    """
    values, delta, _ = _values_and_grid(obj)
    header_delta = 0.0 if delta is None else delta
    lines = [f"# n={len(values)} delta={header_delta!r}"]
    lines.extend(repr(v) for v in values)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_values(path: str) -> tuple[list[float], float | None]:
    """Read a value file back; returns (sorted values, grid delta or None)."""
    delta: float | None = None
    values: list[float] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for part in line[1:].split():
                    if part.startswith("delta="):
                        d = float(part[len("delta="):])
                        delta = d if d > 0 else None
                continue
            values.append(float(line))
    values.sort()
    return values, delta
