"""Planar surface code in the Pauli-frame picture with an exact MWPM decoder.

Coordinates live on a ``(2d-1) x (2d-1)`` grid. Data qubits sit where
``r + c`` is even, measure-Z qubits at odd ``r`` / even ``c`` and measure-X
qubits at even ``r`` / odd ``c``. Syndrome extraction is an ideal single
parity readout.

X-error chains end on the top and bottom rows, Z-error chains on the left and
right columns. The logical X operator therefore runs down column 0 and the
logical Z operator along row 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, NamedTuple, Sequence

import numpy as np

Coord = tuple[int, int]
MAX_FLIPS = 16


class TractabilityError(RuntimeError):
    """Too many syndromes of one type for exact subset matching."""


@dataclass(frozen=True)
class SurfaceCodeLayout:
    distance: int
    data: tuple[Coord, ...]
    measure_z: tuple[Coord, ...]
    measure_x: tuple[Coord, ...]
    hz: np.ndarray  # measure-Z x data, detects X/Y
    hx: np.ndarray  # measure-X x data, detects Z/Y

    @property
    def size(self) -> int:
        return 2 * self.distance - 1

    @property
    def data_index(self) -> dict[Coord, int]:
        return {q: i for i, q in enumerate(self.data)}

    @property
    def logical_x_support(self) -> tuple[Coord, ...]:
        return tuple(q for q in self.data if q[1] == 0)

    @property
    def logical_z_support(self) -> tuple[Coord, ...]:
        return tuple(q for q in self.data if q[0] == 0)

    def neighbors(self, q: Coord) -> list[Coord]:
        r, c = q
        L = self.size
        return [(a, b) for a, b in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
                if 0 <= a < L and 0 <= b < L]


def build_layout(d: int) -> SurfaceCodeLayout:
    if d < 1:
        raise ValueError("code distance must be >= 1")
    L = 2 * d - 1
    cells = [(r, c) for r in range(L) for c in range(L)]
    data = tuple(q for q in cells if (q[0] + q[1]) % 2 == 0)
    mz = tuple(q for q in cells if q[0] % 2 == 1 and q[1] % 2 == 0)
    mx = tuple(q for q in cells if q[0] % 2 == 0 and q[1] % 2 == 1)
    index = {q: i for i, q in enumerate(data)}

    def checks(stabs):
        h = np.zeros((len(stabs), len(data)), dtype=np.uint8)
        for i, (r, c) in enumerate(stabs):
            for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if nb in index:
                    h[i, index[nb]] = 1
        return h

    return SurfaceCodeLayout(d, data, mz, mx, checks(mz), checks(mx))


class PauliPattern:
    """Pauli operator on the data qubits, kept as X and Z bit vectors."""

    __slots__ = ("x", "z")
    _LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}

    def __init__(self, x: np.ndarray, z: np.ndarray):
        self.x = np.asarray(x, dtype=np.uint8) & 1
        self.z = np.asarray(z, dtype=np.uint8) & 1

    @classmethod
    def identity(cls, layout: SurfaceCodeLayout) -> "PauliPattern":
        n = len(layout.data)
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_dict(cls, layout: SurfaceCodeLayout, ops: Mapping[Coord, str]) -> "PauliPattern":
        pat = cls.identity(layout)
        index = layout.data_index
        for q, op in ops.items():
            if q not in index:
                raise ValueError(f"{q} is not a data qubit")
            i = index[q]
            op = op.upper()
            if op not in "IXYZ":
                raise ValueError(f"unknown Pauli {op!r}")
            pat.x[i] = op in "XY"
            pat.z[i] = op in "YZ"
        return pat

    def to_dict(self, layout: SurfaceCodeLayout) -> dict[Coord, str]:
        return {q: self._LETTERS[(int(a), int(b))]
                for q, a, b in zip(layout.data, self.x, self.z) if a or b}

    def compose(self, other: "PauliPattern") -> "PauliPattern":
        """Qubit-wise product, ignoring phase."""
        return PauliPattern(self.x ^ other.x, self.z ^ other.z)

    __xor__ = compose

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, PauliPattern) and np.array_equal(self.x, other.x)
                and np.array_equal(self.z, other.z))

    def __repr__(self) -> str:
        return f"PauliPattern(weight={self.weight})"


@dataclass(frozen=True)
class SyndromeMap:
    flipped_z: frozenset[Coord]
    flipped_x: frozenset[Coord]

    @property
    def empty(self) -> bool:
        return not self.flipped_z and not self.flipped_x

    def __xor__(self, other: "SyndromeMap") -> "SyndromeMap":
        return SyndromeMap(self.flipped_z ^ other.flipped_z, self.flipped_x ^ other.flipped_x)


def inject_errors(layout: SurfaceCodeLayout, p: float, seed: int | np.random.Generator) -> PauliPattern:
    """Depolarizing noise: X, Y or Z each with probability ``p / 3`` per data qubit."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    n = len(layout.data)
    hit = rng.random(n) < p
    kind = rng.integers(0, 3, n)
    return PauliPattern(hit & (kind <= 1), hit & (kind >= 1))


def extract_syndrome(layout: SurfaceCodeLayout, errors: PauliPattern) -> SyndromeMap:
    sz = (layout.hz.astype(np.int64) @ errors.x) % 2
    sx = (layout.hx.astype(np.int64) @ errors.z) % 2
    return SyndromeMap(frozenset(q for q, b in zip(layout.measure_z, sz) if b),
                       frozenset(q for q, b in zip(layout.measure_x, sx) if b))


# -- matching ---------------------------------------------------------------

def pair_weight(a: Coord, b: Coord) -> float:
    return (abs(a[0] - b[0]) + abs(a[1] - b[1])) / 2


def boundary_weight(q: Coord, d: int, kind: str) -> float:
    # measure-Z chains end on rows 0 / 2d-2, measure-X chains on columns
    t = q[0] if kind == "Z" else q[1]
    return min((t + 1) / 2, (2 * d - 1 - t) / 2)


class Matching(NamedTuple):
    weight: float
    pairs: tuple[tuple[int, int], ...]
    to_boundary: tuple[int, ...]


def min_weight_matching(pair_w: Sequence[Sequence[float]], boundary_w: Sequence[float]) -> Matching:
    """Exact minimum-weight matching where each node pairs up or exits.

    Subset dynamic programme over the lowest unmatched node.
    """
    k = len(boundary_w)
    if k > MAX_FLIPS:
        raise TractabilityError(
            f"{k} syndromes exceed the exact-matching bound of {MAX_FLIPS}; "
            "run the Monte Carlo at a lower error rate")

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[float, tuple]:
        if mask == 0:
            return 0.0, ()
        i = (mask & -mask).bit_length() - 1
        rest = mask & ~(1 << i)
        w, plan = best(rest)
        top = (w + boundary_w[i], (("b", i),) + plan)
        j_mask = rest
        while j_mask:
            j = (j_mask & -j_mask).bit_length() - 1
            j_mask &= j_mask - 1
            w, plan = best(rest & ~(1 << j))
            cand = w + pair_w[i][j]
            if cand < top[0]:
                top = (cand, (("p", i, j),) + plan)
        return top

    total, plan = best((1 << k) - 1)
    pairs = tuple((s[1], s[2]) for s in plan if s[0] == "p")
    exits = tuple(s[1] for s in plan if s[0] == "b")
    return Matching(total, pairs, exits)


def _chain(a: Coord, b: Coord, first_axis: int) -> list[Coord]:
    """Data qubits between two same-type measurement qubits."""
    out = []
    cur = list(a)
    for axis in (first_axis, 1 - first_axis):
        while cur[axis] != b[axis]:
            step = 2 if b[axis] > cur[axis] else -2
            q = list(cur)
            q[axis] += step // 2
            out.append(tuple(q))
            cur[axis] += step
    return out


def _exit_chain(q: Coord, d: int, axis: int) -> list[Coord]:
    t = q[axis]
    last = 2 * d - 2
    if (t + 1) <= (last + 1 - t):
        coords = range(t - 1, -1, -2)
    else:
        coords = range(t + 1, last + 1, 2)
    out = []
    for v in coords:
        c = list(q)
        c[axis] = v
        out.append(tuple(c))
    return out


def match_type(layout: SurfaceCodeLayout, flips: Sequence[Coord], kind: str) -> Matching:
    pts = sorted(flips)
    d = layout.distance
    pw = [[pair_weight(a, b) for b in pts] for a in pts]
    bw = [boundary_weight(q, d, kind) for q in pts]
    return min_weight_matching(pw, bw)


def decode_mwpm(layout: SurfaceCodeLayout, syndrome: SyndromeMap) -> PauliPattern:
    corr = PauliPattern.identity(layout)
    index = layout.data_index
    for kind, flips, bits, axis in (("Z", syndrome.flipped_z, corr.x, 0),
                                    ("X", syndrome.flipped_x, corr.z, 1)):
        pts = sorted(flips)
        if not pts:
            continue
        m = match_type(layout, pts, kind)
        chains = [_chain(pts[i], pts[j], axis) for i, j in m.pairs]
        chains += [_exit_chain(pts[i], layout.distance, axis) for i in m.to_boundary]
        for chain in chains:
            for q in chain:
                bits[index[q]] ^= 1
    return corr


def is_logical_failure(layout: SurfaceCodeLayout, residual: PauliPattern) -> bool:
    """Residual flips a logical: odd X/Y on row 0, or odd Z/Y on column 0."""
    index = layout.data_index
    zrow = [index[q] for q in layout.logical_z_support]
    xcol = [index[q] for q in layout.logical_x_support]
    return bool(residual.x[zrow].sum() % 2 or residual.z[xcol].sum() % 2)


# -- Monte Carlo --------------------------------------------------------------

class MonteCarloResult(NamedTuple):
    rate: float
    ci95: float
    trials: int
    failures: int
    intractable: int


def simulate_logical_errors(d: int, p: float, trials: int, seed: int) -> MonteCarloResult:
    """Inject, extract, decode and check, ``trials`` times.

    Trials whose syndrome is too large to match exactly are counted in
    ``intractable`` and left out of the rate.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    layout = build_layout(d)
    rng = np.random.default_rng(seed)
    n = len(layout.data)
    hit = rng.random((trials, n)) < p
    kind = rng.integers(0, 3, (trials, n))
    ex = (hit & (kind <= 1)).astype(np.uint8)
    ez = (hit & (kind >= 1)).astype(np.uint8)
    sz = (ex.astype(np.int64) @ layout.hz.T.astype(np.int64)) % 2
    sx = (ez.astype(np.int64) @ layout.hx.T.astype(np.int64)) % 2
    index = layout.data_index
    zrow = np.array([index[q] for q in layout.logical_z_support])
    xcol = np.array([index[q] for q in layout.logical_x_support])
    cache: dict[bytes, PauliPattern | None] = {}
    failures = 0
    bad = 0
    for t in range(trials):
        rx, rz = ex[t], ez[t]
        if sz[t].any() or sx[t].any():
            key = sz[t].tobytes() + b"|" + sx[t].tobytes()
            if key not in cache:
                syn = SyndromeMap(
                    frozenset(q for q, b in zip(layout.measure_z, sz[t]) if b),
                    frozenset(q for q, b in zip(layout.measure_x, sx[t]) if b))
                try:
                    cache[key] = decode_mwpm(layout, syn)
                except TractabilityError:
                    cache[key] = None
            corr = cache[key]
            if corr is None:
                bad += 1
                continue
            rx = rx ^ corr.x
            rz = rz ^ corr.z
        if rx[zrow].sum() % 2 or rz[xcol].sum() % 2:
            failures += 1
    used = trials - bad
    rate = failures / used if used else math.nan
    ci = 1.96 * math.sqrt(rate * (1 - rate) / used) if used else math.nan
    return MonteCarloResult(rate, ci, trials, failures, bad)


def logical_error_rate(d: int, p: float, trials: int, seed: int) -> tuple[float, float]:
    res = simulate_logical_errors(d, p, trials, seed)
    return res.rate, res.ci95


def calibrate_omega(d: int, f_in: float, trials: int, seed: int) -> float:
    """Fidelity gained by one correction cycle on qubits arriving at ``f_in``."""
    if not 0.0 < f_in <= 1.0:
        raise ValueError("f_in must lie in (0, 1]")
    rate, _ = logical_error_rate(d, 1.0 - f_in, trials, seed)
    return max(0.0, (1.0 - rate) - f_in)
