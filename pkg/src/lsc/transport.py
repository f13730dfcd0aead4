"""Photon transport in a dye-doped slab.

The slab occupies [0, length] x [0, width] x [0, thickness]; z is normal to
the large faces. Rays start at uniform volume points with isotropic
directions. The large faces reflect specularly beyond the critical angle and
transmit inside the escape cone; the four side edges collect.

Specular reflection at the faces leaves |cos theta| and the horizontal
direction unchanged, so each ray segment is resolved in closed form by
unfolding the reflections rather than stepping bounce by bounce.
"""

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache

import numpy as np
from scipy import optimize

from .errors import DomainError
from .rng import stream_keys, uniform_from_keys

# draw counters within one generation of one ray
_DRAW_X, _DRAW_Y, _DRAW_Z, _DRAW_COS, _DRAW_PHI, _DRAW_ABS, _DRAW_FRESNEL, _DRAW_REEMIT = range(8)
_GEN_STRIDE = 16
_CALIBRATION_SALT = 0x5EED_CA1B_0000_0001
CALIBRATION_RAYS = 1 << 16
DEFAULT_BATCH = 1 << 20


class Outcome(IntEnum):
    EDGE_COLLECTED = 0
    ESCAPED_TOP = 1
    ESCAPED_BOTTOM = 2
    REABSORBED_LOST = 3

    @property
    def tag(self):
        return self.name.lower()


OUTCOME_TAGS = tuple(o.tag for o in Outcome)


@dataclass(frozen=True)
class SlabSpec:
    length: float
    width: float
    thickness: float
    n_refr: float = 1.5
    eta_a: float = 1.0
    eta_f: float = 1.0
    theta_q: float = 0.0

    def __post_init__(self):
        for name in ("length", "width", "thickness"):
            if not getattr(self, name) > 0:
                raise DomainError(f"slab {name} must be positive")
        if not self.n_refr >= 1:
            raise DomainError(f"refractive index must be >= 1, got {self.n_refr}")
        for name in ("eta_a", "eta_f", "theta_q"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value}")

    @property
    def cos_critical(self):
        """Cosine of the critical angle measured from the face normal."""
        return math.sqrt(1.0 - 1.0 / self.n_refr**2)


@dataclass(frozen=True)
class RayOutcome:
    tag: str
    path_length: float
    bounce_count: int


@dataclass(frozen=True)
class TransportResult:
    n_rays: int
    eta_t_estimate: float
    std_error: float
    outcome_counts: dict
    seed: int
    attenuation: float = 0.0
    mean_path_length: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if sum(self.outcome_counts.values()) != self.n_rays:
            raise ValueError("outcome counts do not add up to n_rays")


def trapping_efficiency_analytic(n_refr):
    """Fraction of isotropic emission outside both escape cones, sqrt(1 - 1/n^2)."""
    if not n_refr >= 1:
        raise DomainError(f"refractive index must be >= 1, got {n_refr}")
    return math.sqrt(1.0 - 1.0 / n_refr**2)


def geometric_gain(slab):
    """Top-face area over total edge area."""
    return slab.length * slab.width / (2.0 * (slab.length + slab.width) * slab.thickness)


def flux_gain(slab, eta_t):
    """G eta_a eta_f eta_t (1 - theta_q)."""
    if not 0.0 <= eta_t <= 1.0:
        raise DomainError("eta_t must lie in [0, 1]")
    return geometric_gain(slab) * slab.eta_a * slab.eta_f * eta_t * (1.0 - slab.theta_q)


def fresnel_reflectance(cos_i, n_refr):
    """Unpolarised reflectance for light leaving a medium of index n into air."""
    cos_i = np.asarray(cos_i, dtype=float)
    sin_t2 = n_refr**2 * (1.0 - cos_i**2)
    out = np.ones_like(cos_i)
    ok = sin_t2 < 1.0
    ci = cos_i[ok]
    ct = np.sqrt(1.0 - sin_t2[ok])
    rs = ((n_refr * ci - ct) / (n_refr * ci + ct)) ** 2
    rp = ((ci - n_refr * ct) / (ci + n_refr * ct)) ** 2
    out[ok] = 0.5 * (rs + rp)
    return out


def _distance_to_edge(slab, x, y, dx, dy):
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = np.where(dx > 0, (slab.length - x) / dx, np.where(dx < 0, -x / dx, np.inf))
        ty = np.where(dy > 0, (slab.width - y) / dy, np.where(dy < 0, -y / dy, np.inf))
    return np.minimum(tx, ty)


def _first_face_hit(slab, z, cz):
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.where(cz > 0, (slab.thickness - z) / cz, np.where(cz < 0, -z / cz, np.inf))
        spacing = np.where(cz != 0, slab.thickness / np.abs(cz), np.inf)
    return first, spacing


def _hits_before(first, spacing, distance):
    with np.errstate(invalid="ignore"):
        n = np.floor((distance - first) / spacing) + 1.0
    n = np.where(first < distance, n, 0.0)
    return np.nan_to_num(n, nan=0.0, posinf=2.0**62).astype(np.int64)


def _fold_z(slab, z_unfolded):
    period = 2.0 * slab.thickness
    m = np.mod(z_unfolded, period)
    return np.where(m <= slab.thickness, m, period - m)


@lru_cache(maxsize=64)
def calibrate_attenuation(slab, seed):
    """Attenuation coefficient (1/m) giving mean loss theta_q over trapped paths.

    Solves  mean(1 - exp(-alpha L)) = theta_q  where L is the distance to the
    edge of trapped rays from a fixed calibration sample drawn from ``seed``.
    With n = 1 nothing is trapped and every direction is used instead.
    """
    if slab.theta_q == 0.0:
        return 0.0
    if slab.theta_q == 1.0:
        return math.inf
    idx = np.arange(CALIBRATION_RAYS, dtype=np.uint64)
    keys = stream_keys(int(seed) ^ _CALIBRATION_SALT, idx)
    x = slab.length * uniform_from_keys(keys, _DRAW_X)
    y = slab.width * uniform_from_keys(keys, _DRAW_Y)
    cmax = slab.cos_critical if slab.cos_critical > 0 else 1.0
    cz = cmax * (2.0 * uniform_from_keys(keys, _DRAW_COS) - 1.0)
    phi = 2.0 * np.pi * uniform_from_keys(keys, _DRAW_PHI)
    s = np.sqrt(1.0 - cz**2)
    L = _distance_to_edge(slab, x, y, s * np.cos(phi), s * np.sin(phi))
    L = L[np.isfinite(L)]
    scale = float(np.mean(L))

    def excess(log_a):
        return float(np.mean(-np.expm1(-math.exp(log_a) / scale * L))) - slab.theta_q

    log_a = optimize.brentq(excess, math.log(1e-12), math.log(1e12), xtol=1e-14, rtol=1e-14)
    return math.exp(log_a) / scale


def trace_batch(slab, ray_indices, seed, attenuation=None, fresnel=False, reemission=False,
                max_generations=64):
    """Trace the given rays. Returns arrays (outcome, path_length, bounce_count)."""
    if attenuation is None:
        attenuation = calibrate_attenuation(slab, seed)
    idx = np.asarray(ray_indices, dtype=np.uint64)
    n = idx.size
    keys = stream_keys(seed, idx)
    outcome = np.full(n, Outcome.REABSORBED_LOST, dtype=np.int8)
    path = np.zeros(n)
    bounces = np.zeros(n, dtype=np.int64)

    x = slab.length * uniform_from_keys(keys, _DRAW_X)
    y = slab.width * uniform_from_keys(keys, _DRAW_Y)
    z = slab.thickness * uniform_from_keys(keys, _DRAW_Z)
    active = np.arange(n)
    cos_c = slab.cos_critical

    for gen in range(max_generations):
        if active.size == 0:
            break
        k = keys[active]
        base = gen * _GEN_STRIDE
        cz = 2.0 * uniform_from_keys(k, base + _DRAW_COS) - 1.0
        phi = 2.0 * np.pi * uniform_from_keys(k, base + _DRAW_PHI)
        s = np.sqrt(1.0 - cz**2)
        dx, dy = s * np.cos(phi), s * np.sin(phi)
        xa, ya, za = x[active], y[active], z[active]

        t_edge = _distance_to_edge(slab, xa, ya, dx, dy)
        if attenuation == 0.0:
            t_abs = np.full(active.size, np.inf)
        elif math.isinf(attenuation):
            t_abs = np.zeros(active.size)
        else:
            t_abs = -np.log1p(-uniform_from_keys(k, base + _DRAW_ABS)) / attenuation
        t_end = np.minimum(t_edge, t_abs)
        first, spacing = _first_face_hit(slab, za, cz)
        hits = _hits_before(first, spacing, t_end)

        in_cone = np.abs(cz) > cos_c
        if fresnel:
            R = fresnel_reflectance(np.abs(cz), slab.n_refr)
            u = uniform_from_keys(k, base + _DRAW_FRESNEL)
            with np.errstate(divide="ignore", invalid="ignore"):
                j = np.where(R > 0, np.floor(np.log1p(-u) / np.log(R)), 0.0)
            j = np.where(in_cone, j, np.inf)
        else:
            j = np.where(in_cone, 0.0, np.inf)
        escaped = j < hits
        jj = np.where(escaped, j, 0).astype(np.int64)
        top = (cz > 0) ^ (jj % 2 == 1)

        seg_path = np.where(escaped, first + jj * spacing, t_end)
        seg_bounces = np.where(escaped, jj, hits)
        absorbed = ~escaped & (t_abs < t_edge)
        reached_edge = ~escaped & ~absorbed

        path[active] += seg_path
        bounces[active] += seg_bounces
        outcome[active[escaped & top]] = Outcome.ESCAPED_TOP
        outcome[active[escaped & ~top]] = Outcome.ESCAPED_BOTTOM
        outcome[active[reached_edge]] = Outcome.EDGE_COLLECTED
        outcome[active[absorbed]] = Outcome.REABSORBED_LOST

        if not reemission:
            break
        keep = absorbed & (uniform_from_keys(k, base + _DRAW_REEMIT) < slab.eta_f)
        ell = t_abs[keep]
        x[active[keep]] = xa[keep] + dx[keep] * ell
        y[active[keep]] = ya[keep] + dy[keep] * ell
        z[active[keep]] = _fold_z(slab, za[keep] + cz[keep] * ell)
        active = active[keep]
    return outcome, path, bounces


def trace_ray(slab, index, seed, **kwargs):
    outcome, path, bounces = trace_batch(slab, [index], seed, **kwargs)
    return RayOutcome(Outcome(int(outcome[0])).tag, float(path[0]), int(bounces[0]))


def trace_rays(slab, n_rays, seed, fresnel=False, reemission=False, workers=1,
               batch_size=DEFAULT_BATCH):
    """Monte Carlo estimate of the edge-collection (trapping) efficiency.

    Ray i draws only from the stream keyed by (seed, i), so the result does
    not depend on ``workers`` or ``batch_size``.
    """
    if n_rays < 1:
        raise DomainError("n_rays must be at least 1")
    seed = int(seed)
    alpha = calibrate_attenuation(slab, seed)
    starts = range(0, n_rays, batch_size)
    lock = threading.Lock()
    counts = np.zeros(len(Outcome), dtype=np.int64)
    path_total = [0.0] * len(starts)

    def run(item):
        b, start = item
        stop = min(start + batch_size, n_rays)
        outcome, path, _ = trace_batch(
            slab, np.arange(start, stop, dtype=np.uint64), seed, alpha, fresnel, reemission
        )
        local = np.bincount(outcome, minlength=len(Outcome))
        path_total[b] = float(np.sum(path))
        with lock:
            counts[:] += local

    items = list(enumerate(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, items))
    else:
        for item in items:
            run(item)

    edge = int(counts[Outcome.EDGE_COLLECTED])
    p = edge / n_rays
    return TransportResult(
        n_rays=n_rays,
        eta_t_estimate=p,
        std_error=math.sqrt(p * (1.0 - p) / n_rays),
        outcome_counts={o.tag: int(counts[o]) for o in Outcome},
        seed=seed,
        attenuation=alpha,
        mean_path_length=math.fsum(path_total) / n_rays,
    )
