"""
Basin rendering on the dynamical and parameter planes.

Every pixel centre is iterated until its orbit is confirmed in the
super-attracting cycle: entry into the chordal trap ball of cycle point k
counts only when the following p iterates visit the traps k+1, …, k+p in
turn. Pixels that never confirm within ``max_iter`` stay undecided, the
computational stand-in for the Julia set.

The per-pixel loop is compiled with numba and runs without the GIL, so
64×64 tiles are farmed out to a thread pool. Each pixel is written by
exactly one tile; results do not depend on tile size or worker count.
"""

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numba import njit
from PIL import Image

from .constants import (
    CHART_SWITCH,
    DEGENERATE,
    DEGENERATE_TOL,
    LAMBDA_DEGENERACY_TOL,
    MAX_ITER,
    PERIODIC_MAX_PERIOD,
    PERIODIC_TOL,
    TILE_SIZE,
    TIME_BRIGHTNESS_CAP,
    TIME_BRIGHTNESS_STEP,
    TRAP_FRACTION,
    TRAP_RADIUS,
    UNDECIDED,
    WORKERS_ENV,
    ZERO_NUDGE,
)
from .errors import ConfigError, DomainError
from .family import lambda_prime, persian_carpet_coefficients
from .numerics import (
    PointLike,
    Polynomial,
    RationalMap,
    SpherePoint,
    as_sphere_point,
    chordal_distance,
    polynomial_roots,
)

logger = logging.getLogger(__name__)

CHARTS = ("standard", "inverted")


# =============================================================================
# VIEWPORT AND GRID
# =============================================================================

@dataclass(frozen=True)
class Viewport:
    """
    Axis-aligned window of a chart. Row 0 is the top edge; pixel (i, j) has
    its centre at center − width/2 + (j+½)·width/px_w (real part) and
    center + height/2 − (i+½)·height/px_h (imaginary part).
    """
    center: complex
    width: float
    height: float
    px_w: int
    px_h: int
    chart: str = "standard"

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"viewport extent must be positive, got {self.width} x {self.height}")
        if self.px_w < 1 or self.px_h < 1:
            raise ValueError(f"pixel counts must be >= 1, got {self.px_w} x {self.px_h}")
        if self.chart not in CHARTS:
            raise ValueError(f"chart must be one of {CHARTS}, got {self.chart!r}")
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def square(cls, center: complex, width: float, px: int, chart: str = "standard") -> "Viewport":
        return cls(complex(center), float(width), float(width), int(px), int(px), chart)

    @property
    def pixel_width(self) -> float:
        return self.width / self.px_w

    @property
    def pixel_height(self) -> float:
        return self.height / self.px_h

    def pixel_to_point(self, i: float, j: float) -> complex:
        re = self.center.real - self.width / 2 + (j + 0.5) * self.pixel_width
        im = self.center.imag + self.height / 2 - (i + 0.5) * self.pixel_height
        return complex(re, im)

    def point_to_pixel(self, z: complex) -> Tuple[float, float]:
        """Inverse of pixel_to_point; integral at pixel centres."""
        j = (z.real - self.center.real + self.width / 2) / self.pixel_width - 0.5
        i = (self.center.imag + self.height / 2 - z.imag) / self.pixel_height - 0.5
        return i, j

    def grid(self) -> np.ndarray:
        """Pixel-centre chart values, shape (px_h, px_w)."""
        j = np.arange(self.px_w)
        i = np.arange(self.px_h)
        re = self.center.real - self.width / 2 + (j + 0.5) * self.pixel_width
        im = self.center.imag + self.height / 2 - (i + 0.5) * self.pixel_height
        return re[np.newaxis, :] + 1j * im[:, np.newaxis]

    def to_dict(self) -> Dict:
        return {
            "center": [self.center.real, self.center.imag],
            "width": self.width,
            "height": self.height,
            "px_w": self.px_w,
            "px_h": self.px_h,
            "chart": self.chart,
        }


@dataclass
class BasinGrid:
    """
    Per-pixel classification (basin index, UNDECIDED or DEGENERATE) and the
    step at which the orbit entered its trap.
    """
    classes: np.ndarray
    times: np.ndarray
    viewport: Viewport
    period: int
    metadata: Dict = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.classes.shape

    @property
    def undecided_mask(self) -> np.ndarray:
        """Undecided pixels, degenerate ones included."""
        return self.classes < 0

    def counts(self) -> Dict[str, int]:
        out = {str(k): int((self.classes == k).sum()) for k in range(self.period)}
        out["undecided"] = int((self.classes == UNDECIDED).sum())
        out["degenerate"] = int((self.classes == DEGENERATE).sum())
        return out

    def to_dict(self) -> Dict:
        out = dict(self.metadata)
        out["viewport"] = self.viewport.to_dict()
        out["period"] = self.period
        out["counts"] = self.counts()
        return out


# =============================================================================
# COMPILED KERNELS
# =============================================================================

@njit(nogil=True)
def _horner(coeffs, x):
    value = 0j
    bound = 0.0
    ax = abs(x)
    for k in range(coeffs.shape[0] - 1, -1, -1):
        value = value * x + coeffs[k]
        bound = bound * ax + abs(coeffs[k])
    return value, bound


@njit(nogil=True)
def _step(x, inverted, num, den, num_r, den_r):
    """One application of the map in chart form; the flag reports 0/0."""
    if inverted:
        n, nb = _horner(num_r, x)
        d, db = _horner(den_r, x)
    else:
        n, nb = _horner(num, x)
        d, db = _horner(den, x)
    if abs(n) <= DEGENERATE_TOL * nb and abs(d) <= DEGENERATE_TOL * db:
        return 0j, False, True
    if d == 0j:
        return 0j, True, False
    if abs(n) > CHART_SWITCH * abs(d):
        return d / n, True, False
    return n / d, False, False


@njit(nogil=True)
def _chordal(x1, inv1, x2, inv2):
    if inv1:
        a0, a1 = 1.0 + 0j, x1
    else:
        a0, a1 = x1, 1.0 + 0j
    if inv2:
        b0, b1 = 1.0 + 0j, x2
    else:
        b0, b1 = x2, 1.0 + 0j
    cross = abs(a0 * b1 - a1 * b0)
    na = np.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
    nb = np.sqrt(abs(b0) ** 2 + abs(b1) ** 2)
    return 2.0 * cross / (na * nb)


@njit(nogil=True)
def _homogeneous_chordal(x, inverted, hx, hy):
    if inverted:
        a0, a1 = 1.0 + 0j, x
    else:
        a0, a1 = x, 1.0 + 0j
    cross = abs(a0 * hy - a1 * hx)
    na = np.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
    nb = np.sqrt(abs(hx) ** 2 + abs(hy) ** 2)
    return 2.0 * cross / (na * nb)


@njit(nogil=True)
def _trap_index(x, inverted, cx, cy, trap):
    for k in range(cx.shape[0]):
        if _homogeneous_chordal(x, inverted, cx[k], cy[k]) < trap:
            return k
    return -1


@njit(nogil=True)
def _classify(x, inverted, num, den, num_r, den_r, cx, cy, trap, max_iter):
    p = cx.shape[0]
    x0 = x
    inv0 = inverted
    candidate = -1
    entered = 0
    limit = max_iter + p
    for t in range(limit + 1):
        k = _trap_index(x, inverted, cx, cy, trap)
        if candidate >= 0:
            if k == (candidate + t - entered) % p:
                if t - entered == p:
                    return candidate, entered
            else:
                candidate = -1
        if candidate < 0 and k >= 0 and t <= max_iter:
            candidate = k
            entered = t
        if candidate < 0 and 0 < t <= PERIODIC_MAX_PERIOD:
            if _chordal(x, inverted, x0, inv0) < PERIODIC_TOL:
                return UNDECIDED, t
        if t == limit:
            break
        x, inverted, degenerate = _step(x, inverted, num, den, num_r, den_r)
        if degenerate:
            return DEGENERATE, t
    return UNDECIDED, max_iter


@njit(nogil=True)
def _dynamical_tile(values, inverted, num, den, num_r, den_r, cx, cy, trap, max_iter,
                    classes, times, r0, r1, c0, c1):
    for i in range(r0, r1):
        for j in range(c0, c1):
            c, t = _classify(values[i, j], inverted[i, j], num, den, num_r, den_r, cx, cy, trap, max_iter)
            classes[i, j] = c
            times[i, j] = t


@njit(nogil=True)
def _parameter_tile(lams, starts, start_inverted, nums, dens, blocked, trap_cap, max_iter,
                    classes, times, r0, r1, c0, c1):
    num = np.zeros(2, dtype=np.complex128)
    den = np.zeros(4, dtype=np.complex128)
    num_r = np.zeros(4, dtype=np.complex128)
    den_r = np.zeros(4, dtype=np.complex128)
    cx = np.zeros(4, dtype=np.complex128)
    cy = np.ones(4, dtype=np.complex128)
    for i in range(r0, r1):
        for j in range(c0, c1):
            if blocked[i, j]:
                classes[i, j] = DEGENERATE
                times[i, j] = 0
                continue
            lam = lams[i, j]
            for k in range(2):
                num[k] = nums[i, j, k]
                num_r[3 - k] = nums[i, j, k]
            for k in range(4):
                den[k] = dens[i, j, k]
                den_r[3 - k] = dens[i, j, k]
            # cycle λ → 1 → ∞ → 0 in homogeneous coordinates
            cx[0] = lam
            cx[1] = 1.0
            cx[2] = 1.0
            cy[2] = 0.0
            cx[3] = 0.0
            spacing = 2.0
            for a in range(4):
                for b in range(a + 1, 4):
                    inv_a = cy[a] == 0j
                    xa = 0j if inv_a else cx[a]
                    dist = _homogeneous_chordal(xa, inv_a, cx[b], cy[b])
                    if dist < spacing:
                        spacing = dist
            trap = min(trap_cap, TRAP_FRACTION * spacing)
            c, t = _classify(starts[i, j], start_inverted[i, j], num, den, num_r, den_r, cx, cy, trap, max_iter)
            classes[i, j] = c
            times[i, j] = t


@njit(nogil=True)
def _find(parent, a):
    root = a
    while parent[root] != root:
        root = parent[root]
    while parent[a] != root:
        nxt = parent[a]
        parent[a] = root
        a = nxt
    return root


@njit(nogil=True)
def _label(mask):
    h, w = mask.shape
    provisional = np.zeros((h, w), dtype=np.int64)
    parent = np.zeros(h * w + 1, dtype=np.int64)
    count = 0
    for i in range(h):
        for j in range(w):
            if not mask[i, j]:
                continue
            up = provisional[i - 1, j] if i > 0 else 0
            left = provisional[i, j - 1] if j > 0 else 0
            if up == 0 and left == 0:
                count += 1
                parent[count] = count
                provisional[i, j] = count
            elif up == 0 or left == 0:
                provisional[i, j] = up + left
            else:
                ru = _find(parent, up)
                rl = _find(parent, left)
                provisional[i, j] = min(ru, rl)
                if ru != rl:
                    parent[max(ru, rl)] = min(ru, rl)
    final = np.zeros(count + 1, dtype=np.int64)
    labels = np.zeros((h, w), dtype=np.int64)
    components = 0
    for i in range(h):
        for j in range(w):
            if provisional[i, j] == 0:
                continue
            root = _find(parent, provisional[i, j])
            if final[root] == 0:
                components += 1
                final[root] = components
            labels[i, j] = final[root]
    return labels, components


# =============================================================================
# SCHEDULING
# =============================================================================

def resolve_workers(workers: Optional[int] = None) -> int:
    """``workers`` if given, else $PERSIAN_CARPET_WORKERS, else the CPU count."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        if env:
            try:
                workers = int(env)
            except ValueError:
                raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
        else:
            workers = os.cpu_count() or 1
    if workers < 1:
        raise ConfigError(f"worker count must be >= 1, got {workers}")
    return workers


def tiles(shape: Tuple[int, int], tile_size: int = TILE_SIZE) -> List[Tuple[int, int, int, int]]:
    """Row-major (r0, r1, c0, c1) blocks covering the grid exactly once."""
    if tile_size < 1:
        raise ValueError(f"tile size must be >= 1, got {tile_size}")
    h, w = shape
    return [(r, min(r + tile_size, h), c, min(c + tile_size, w))
            for r in range(0, h, tile_size) for c in range(0, w, tile_size)]


def _run_tiles(kernel: Callable, args: Tuple, shape: Tuple[int, int],
               tile_size: int, workers: int) -> Tuple[np.ndarray, np.ndarray]:
    classes = np.full(shape, UNDECIDED, dtype=np.int32)
    times = np.zeros(shape, dtype=np.int32)
    blocks = tiles(shape, tile_size)
    logger.info("rendering %dx%d in %d tiles on %d workers", shape[1], shape[0], len(blocks), workers)

    def work(block):
        kernel(*args, classes, times, *block)

    if workers == 1:
        for block in blocks:
            work(block)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, blocks))
    return classes, times


# =============================================================================
# MAPS AND TRAPS
# =============================================================================

def _kernel_coefficients(f: RationalMap) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    d = f.degree
    return (
        f.numerator.as_array(),
        f.denominator.as_array(),
        f.numerator.reversed(d).as_array(),
        f.denominator.reversed(d).as_array(),
    )


def _cycle_arrays(cycle: Sequence[SpherePoint]) -> Tuple[np.ndarray, np.ndarray]:
    coords = [p.homogeneous() for p in cycle]
    return (np.array([c[0] for c in coords], dtype=np.complex128),
            np.array([c[1] for c in coords], dtype=np.complex128))


def min_cycle_distance(cycle: Sequence[PointLike]) -> float:
    points = [as_sphere_point(z) for z in cycle]
    return min(chordal_distance(a, b) for k, a in enumerate(points) for b in points[k + 1:])


def resolve_trap_radius(cycle: Sequence[PointLike], trap_radius: Optional[float] = None) -> float:
    """
    Explicit radii must be below half the smallest chordal distance between
    cycle points; the default is min(TRAP_RADIUS, 0.4 · that distance).

    Raises:
        ValueError: fewer than two cycle points, or repeated points.
        DomainError: an explicit radius that lets two traps overlap.
    """
    if len(cycle) < 2:
        raise ValueError("a cycle needs at least two points")
    spacing = min_cycle_distance(cycle)
    if spacing == 0:
        raise ValueError("cycle points must be distinct")
    if trap_radius is None:
        radius = min(TRAP_RADIUS, TRAP_FRACTION * spacing)
        if radius < TRAP_RADIUS:
            logger.info("trap radius shrunk to %.3g for cycle spacing %.3g", radius, spacing)
        return radius
    if trap_radius <= 0:
        raise ValueError(f"trap radius must be positive, got {trap_radius}")
    if trap_radius >= spacing / 2:
        raise DomainError(f"trap radius {trap_radius} is not below half the cycle spacing {spacing:.6g}")
    return float(trap_radius)


def _start_chart(points: np.ndarray, chart: str) -> Tuple[np.ndarray, np.ndarray]:
    """Normalize chart values the way SpherePoint does."""
    with np.errstate(divide="ignore", invalid="ignore"):
        if chart == "standard":
            inverted = np.abs(points) > CHART_SWITCH
            values = np.where(inverted, 1.0 / points, points)
        else:
            flip = (points != 0) & (np.abs(1.0 / points) <= CHART_SWITCH)
            inverted = ~flip
            values = np.where(flip, 1.0 / points, points)
    return values.astype(np.complex128), inverted


# =============================================================================
# POINT CLASSIFICATION
# =============================================================================

def classify_point(f: RationalMap, z: PointLike, cycle: Sequence[PointLike],
                   max_iter: int = MAX_ITER, trap_radius: Optional[float] = None) -> Tuple[int, int]:
    """
    (basin index, entry step) or (UNDECIDED, step); DEGENERATE flags a 0/0
    met along the orbit. Uses the same compiled loop as the renderers.
    """
    if max_iter < 0:
        raise ValueError(f"max_iter must be >= 0, got {max_iter}")
    points = [as_sphere_point(c) for c in cycle]
    trap = resolve_trap_radius(points, trap_radius)
    cx, cy = _cycle_arrays(points)
    start = as_sphere_point(z)
    c, t = _classify(start.value, start.inverted, *_kernel_coefficients(f), cx, cy, trap, max_iter)
    return int(c), int(t)


def kernel_orbit(f: RationalMap, z: PointLike, n: int) -> List[SpherePoint]:
    """Orbit computed with the compiled step; stops before a degenerate evaluation."""
    num, den, num_r, den_r = _kernel_coefficients(f)
    point = as_sphere_point(z)
    x, inverted = point.value, point.inverted
    out = [point]
    for _ in range(n):
        x, inverted, degenerate = _step(x, inverted, num, den, num_r, den_r)
        if degenerate:
            break
        out.append(SpherePoint(x, inverted))
    return out


def trap_sequence(f: RationalMap, z: PointLike, cycle: Sequence[PointLike], n: int,
                  trap_radius: Optional[float] = None) -> List[int]:
    """Trap index (or −1) of each of the first n+1 orbit points."""
    points = [as_sphere_point(c) for c in cycle]
    trap = resolve_trap_radius(points, trap_radius)
    cx, cy = _cycle_arrays(points)
    return [int(_trap_index(p.value, p.inverted, cx, cy, trap)) for p in kernel_orbit(f, z, n)]


# =============================================================================
# DYNAMICAL PLANE
# =============================================================================

def render_dynamical(f: RationalMap, cycle: Sequence[PointLike], viewport: Viewport,
                     max_iter: int = MAX_ITER, trap_radius: Optional[float] = None,
                     tile_size: int = TILE_SIZE, workers: Optional[int] = None) -> BasinGrid:
    points = [as_sphere_point(c) for c in cycle]
    trap = resolve_trap_radius(points, trap_radius)
    workers = resolve_workers(workers)
    cx, cy = _cycle_arrays(points)
    values, inverted = _start_chart(viewport.grid(), viewport.chart)
    args = (values, inverted, *_kernel_coefficients(f), cx, cy, trap, max_iter)
    classes, times = _run_tiles(_dynamical_tile, args, values.shape, tile_size, workers)
    metadata = {
        "kind": "dynamical",
        "degree": f.degree,
        "cycle": [[p.to_complex().real, p.to_complex().imag] if not p.is_infinity else "inf" for p in points],
        "max_iter": max_iter,
        "trap_radius": trap,
        "tile_size": tile_size,
    }
    return BasinGrid(classes, times, viewport, len(points), metadata)


# =============================================================================
# PARAMETER PLANE
# =============================================================================

def degenerate_parameters() -> List[complex]:
    """Roots of 1−λ, 1−λ−λ² and 1−4λ+6λ²−λ³, where the cubic family breaks down."""
    roots = [1.0 + 0j]
    roots += polynomial_roots(Polynomial((1, -1, -1)))
    roots += polynomial_roots(Polynomial((1, -4, 6, -1)))
    return roots


def _blocked_pixels(viewport: Viewport, lams: np.ndarray) -> np.ndarray:
    blocked = np.zeros(lams.shape, dtype=bool)
    half_w = viewport.pixel_width / 2
    half_h = viewport.pixel_height / 2
    for root in degenerate_parameters():
        near = (np.abs(lams.real - root.real) <= half_w) & (np.abs(lams.imag - root.imag) <= half_h)
        blocked |= near
    factors = (1 - lams, 1 - lams - lams ** 2, 1 - 4 * lams + 6 * lams ** 2 - lams ** 3)
    for value in factors:
        blocked |= np.abs(value) <= LAMBDA_DEGENERACY_TOL
    return blocked


def classify_parameter(lam: complex, max_iter: int = MAX_ITER, trap_radius: float = TRAP_RADIUS) -> Tuple[int, int]:
    """Classification of the free critical orbit of f_λ, as one parameter-plane pixel."""
    viewport = Viewport.square(lam, 1e-12, 1)
    grid = render_parameter(viewport, max_iter, trap_radius, workers=1)
    return int(grid.classes[0, 0]), int(grid.times[0, 0])


def render_parameter(viewport: Viewport, max_iter: int = MAX_ITER, trap_radius: float = TRAP_RADIUS,
                     tile_size: int = TILE_SIZE, workers: Optional[int] = None) -> BasinGrid:
    """
    Iterate the free critical point λ' of f_λ for every pixel λ.

    The four cycle points λ, 1, ∞, 0 crowd together as λ → 0, so
    ``trap_radius`` acts as a cap: each pixel uses
    min(trap_radius, 0.4 · its own cycle spacing). Pixels within half a
    pixel of a degenerate parameter are marked DEGENERATE. A sample at
    λ = 0, where the cubic has the common factor z, is moved a
    ZERO_NUDGE share of a pixel along the real axis.
    """
    if viewport.chart != "standard":
        raise ValueError("the parameter plane is rendered in the standard chart")
    if trap_radius <= 0:
        raise ValueError(f"trap radius must be positive, got {trap_radius}")
    workers = resolve_workers(workers)
    lams = viewport.grid().astype(np.complex128)
    nudge = ZERO_NUDGE * min(viewport.pixel_width, viewport.pixel_height)
    at_zero = np.abs(lams) < nudge
    lams = np.where(at_zero, nudge + 0j, lams)
    blocked = _blocked_pixels(viewport, lams)
    if blocked.any():
        logger.warning("%d parameter pixels sit on a degenerate λ", int(blocked.sum()))
    safe = np.where(blocked, 0.01 + 0j, lams)
    nums, dens = persian_carpet_coefficients(safe)
    with np.errstate(divide="ignore", invalid="ignore"):
        starts = lambda_prime(safe)
    starts = np.where(np.isfinite(starts), starts, 0j)
    values, inverted = _start_chart(starts, "standard")
    args = (safe, values, inverted, nums.astype(np.complex128), dens.astype(np.complex128),
            blocked, float(trap_radius), max_iter)
    classes, times = _run_tiles(_parameter_tile, args, lams.shape, tile_size, workers)
    metadata = {
        "kind": "parameter",
        "max_iter": max_iter,
        "trap_radius_cap": trap_radius,
        "tile_size": tile_size,
        "degenerate_pixels": int(blocked.sum()),
        "nudged_pixels": int(at_zero.sum()),
    }
    return BasinGrid(classes, times, viewport, 4, metadata)


# =============================================================================
# COMPONENTS
# =============================================================================

Predicate = Callable[[np.ndarray], np.ndarray]


def connected_components(grid: Union[BasinGrid, np.ndarray],
                         predicate: Optional[Predicate] = None) -> Tuple[np.ndarray, int]:
    """
    4-connected components of the pixels selected by ``predicate`` (applied
    to the class array; undecided pixels by default). A boolean array may
    be passed directly. Labels run 1..count in row-major order of first
    appearance; unselected pixels get 0.
    """
    if isinstance(grid, BasinGrid):
        mask = grid.undecided_mask if predicate is None else predicate(grid.classes)
    else:
        arr = np.asarray(grid)
        mask = arr.astype(bool) if predicate is None else predicate(arr)
    mask = np.ascontiguousarray(mask, dtype=np.bool_)
    if mask.ndim != 2:
        raise ValueError(f"expected a 2-D mask, got shape {mask.shape}")
    labels, count = _label(mask)
    return labels, int(count)


# =============================================================================
# OUTPUT
# =============================================================================

def brightness(times: np.ndarray) -> np.ndarray:
    return 255 - np.minimum(np.asarray(times, dtype=np.int64) * TIME_BRIGHTNESS_STEP, TIME_BRIGHTNESS_CAP)


def palette_table(period: int) -> np.ndarray:
    """
    RGB lookup of shape (period, levels, 3): basin k has hue k/period at
    full saturation, level b has value 255 − b·8 (floored at 64).
    HSV is converted to RGB by Pillow.
    """
    levels = TIME_BRIGHTNESS_CAP // TIME_BRIGHTNESS_STEP + 2
    values = brightness(np.arange(levels))
    hsv = np.zeros((period, levels, 3), dtype=np.uint8)
    hsv[:, :, 0] = ((np.arange(period) * 256) // period)[:, np.newaxis]
    hsv[:, :, 1] = 255
    hsv[:, :, 2] = values[np.newaxis, :]
    image = Image.frombytes("HSV", (levels, period), hsv.tobytes()).convert("RGB")
    return np.asarray(image, dtype=np.uint8).reshape(period, levels, 3)


def colorize(grid: BasinGrid) -> np.ndarray:
    """(px_h, px_w, 3) uint8 image; undecided and degenerate pixels are black."""
    table = palette_table(grid.period)
    levels = table.shape[1]
    rgb = np.zeros(grid.shape + (3,), dtype=np.uint8)
    decided = grid.classes >= 0
    level = np.minimum(grid.times, levels - 1)
    rgb[decided] = table[grid.classes[decided], level[decided]]
    return rgb


def ppm_bytes(rgb: np.ndarray) -> bytes:
    h, w, _ = rgb.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()


def write_image(grid: BasinGrid, path: Union[str, Path],
                palette: Optional[Callable[[BasinGrid], np.ndarray]] = None) -> Path:
    """Binary PPM (P6) for ``.ppm`` paths, PNG through Pillow for ``.png``."""
    path = Path(path)
    rgb = (palette or colorize)(grid)
    suffix = path.suffix.lower()
    if suffix == ".ppm":
        path.write_bytes(ppm_bytes(rgb))
    elif suffix == ".png":
        Image.fromarray(rgb, "RGB").save(path, format="PNG")
    else:
        raise ValueError(f"unsupported image format {path.suffix!r}; use .ppm or .png")
    logger.info("wrote %s", path)
    return path


def sidecar_path(image_path: Union[str, Path]) -> Path:
    return Path(image_path).with_suffix(".json")


def write_sidecar(grid: BasinGrid, image_path: Union[str, Path], extra: Optional[Dict] = None) -> Path:
    meta = grid.to_dict()
    if extra:
        meta.update(extra)
    path = sidecar_path(image_path)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
