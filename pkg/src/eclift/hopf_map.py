"""
Conformal embedding of a flat torus C/Lambda into R^3 through the Hopf
fibration. A closed curve on S^2 of length L enclosing area A lifts to a flat
torus in S^3 with lattice 2*pi*Z + (A/2 + i*L/2)*Z; stereographic projection
makes it a conformal torus in R^3.

Torus coordinates (s, t): s runs along the Hopf fibres with period 2*pi, t is
horizontal arc length in [0, L/2). The row t = L/2 is glued to t = 0 shifted
by the twist: h(s, L/2) = h(s - f_tot, 0), f_tot = A/2.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad

from .cm_order import LatticeLevel
from .emit import EdgePolyline, Marker, Scene
from .errors import OutOfDomain, ProjectionPole, ShearMisaligned
from .modclass import EmbeddingClass
from .sphere_curve import SphereCurveParams, _NODES, _WEIGHTS

logger = logging.getLogger(__name__)

DEFAULT_ARC_SAMPLES = 4096
NEWTON_STEPS = 3
POLE_TOL = 1e-9
TABLE_TOL = 1e-8
# intervals whose halved-rule estimate moves by more than this are redone adaptively
REFINE_TOL = 1e-14
SHEAR_MAX_DENOMINATOR = 1_000_000
IDENTITY_QUATERNION = (1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True, eq=False)
class EmbeddingCtx:
    curve: SphereCurveParams
    cls: EmbeddingClass
    v_table: np.ndarray
    arc_table: np.ndarray
    twist_table: np.ndarray
    l_tot: float
    f_tot: float
    rotation: tuple[float, float, float, float] = IDENTITY_QUATERNION
    twist_power: int = 2


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    quads: np.ndarray
    ns: int
    nt: int

    def euler_characteristic(self) -> int:
        q = self.quads
        edges = np.concatenate([q[:, [0, 1]], q[:, [1, 2]], q[:, [2, 3]], q[:, [3, 0]]])
        unique_edges = np.unique(np.sort(edges, axis=1), axis=0)
        return len(self.vertices) - len(unique_edges) + len(q)


def _twist_density(curve: SphereCurveParams, x, power: int):
    # theta' = 1 for the wavy-circle family
    return np.sin(curve.phi(x) / 2) ** power


def _interval_integrals(f, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Gauss-Legendre integral of f over each [starts[i], ends[i]]."""
    mid = 0.5 * (starts + ends)
    half = 0.5 * (ends - starts)
    x = mid[..., None] + half[..., None] * _NODES
    return (f(x) * _WEIGHTS).sum(axis=-1) * half


def _arc_integrals(curve: SphereCurveParams, v: np.ndarray) -> np.ndarray:
    """Arc length over each interval of v, with adaptive quadrature where the speed dips near a pole."""
    coarse = _interval_integrals(curve.speed, v[:-1], v[1:])
    mid = 0.5 * (v[:-1] + v[1:])
    fine = _interval_integrals(curve.speed, v[:-1], mid) + _interval_integrals(curve.speed, mid, v[1:])
    rough = np.flatnonzero(np.abs(fine - coarse) > REFINE_TOL)
    if len(rough):
        logger.debug(f"refining {len(rough)} arc-length intervals")
    for i in rough:
        coarse[i] = quad(curve.speed, v[i], v[i + 1], epsabs=REFINE_TOL, epsrel=1e-13, limit=200)[0]
    return coarse


def build_embedding_ctx(curve: SphereCurveParams, cls: EmbeddingClass,
                        rotation=None, twist_power: int = 2,
                        samples: int = DEFAULT_ARC_SAMPLES) -> EmbeddingCtx:
    """Tabulates arc length L(v) and twist f(v) on ``samples`` intervals of [0, 2*pi]."""
    if twist_power not in (1, 2):
        raise ValueError(f"twist_power must be 1 or 2, got {twist_power}")
    v = np.linspace(0.0, 2 * math.pi, samples + 1)
    arc = np.concatenate([[0.0], np.cumsum(_arc_integrals(curve, v))])
    twist = np.concatenate([[0.0], np.cumsum(_interval_integrals(
        lambda x: _twist_density(curve, x, twist_power), v[:-1], v[1:]))])
    l_tot, f_tot = float(arc[-1]), float(twist[-1])

    if abs(l_tot - cls.l_star) > TABLE_TOL:
        raise ValueError(f"curve length {l_tot} does not match L* = {cls.l_star}")
    if abs(f_tot - cls.a_star / 2) > TABLE_TOL:
        if twist_power == 2:
            raise ValueError(f"total twist {f_tot} does not match A*/2 = {cls.a_star / 2}")
        logger.warning(f"twist power {twist_power}: total twist {f_tot} differs from A*/2 = {cls.a_star / 2}")

    q = np.asarray(rotation if rotation is not None else IDENTITY_QUATERNION, dtype=float)
    q = q / np.linalg.norm(q)
    logger.debug(f"embedding ctx: L = {l_tot}, f = {f_tot}, rotation {q}")
    return EmbeddingCtx(curve=curve, cls=cls, v_table=v, arc_table=arc, twist_table=twist,
                        l_tot=l_tot, f_tot=f_tot, rotation=tuple(float(c) for c in q),
                        twist_power=twist_power)


def _invert_arc_length(ctx: EmbeddingCtx, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """v with L(v) = target: table lookup, linear guess, then Newton. Returns (v, interval index)."""
    v_tab, arc = ctx.v_table, ctx.arc_table
    idx = np.clip(np.searchsorted(arc, target, side="right") - 1, 0, len(arc) - 2)
    frac = (target - arc[idx]) / (arc[idx + 1] - arc[idx])
    v = v_tab[idx] + frac * (v_tab[idx + 1] - v_tab[idx])
    for _ in range(NEWTON_STEPS):
        length = arc[idx] + _interval_integrals(ctx.curve.speed, v_tab[idx], v)
        v = v - (length - target) / ctx.curve.speed(v)
    return v, idx


def sphere_points(ctx: EmbeddingCtx, s, t) -> np.ndarray:
    """
    Points h(s, t) of the flat torus in S^3 as (Re z, Im z, Re w, Im w), post-rotation applied.

    h = (exp(i(theta + s - f)) sin(phi/2), exp(i(s - f)) cos(phi/2)) with v = L^-1(2t).
    """
    s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
    if np.any(t < 0) or np.any(t >= ctx.l_tot / 2):
        raise OutOfDomain(f"t must lie in [0, {ctx.l_tot / 2}), got range [{t.min()}, {t.max()}]")
    v, idx = _invert_arc_length(ctx, 2 * t)
    phi = ctx.curve.phi(v)
    f = ctx.twist_table[idx] + _interval_integrals(
        lambda x: _twist_density(ctx.curve, x, ctx.twist_power), ctx.v_table[idx], v)
    fibre = s - f
    sin_h, cos_h = np.sin(phi / 2), np.cos(phi / 2)
    h = np.stack([np.cos(v + fibre) * sin_h, np.sin(v + fibre) * sin_h,
                  np.cos(fibre) * cos_h, np.sin(fibre) * cos_h], axis=-1)
    if ctx.rotation != IDENTITY_QUATERNION:
        h = _quaternion_left_multiply(ctx.rotation, h)
    return h


def _quaternion_left_multiply(q, h: np.ndarray) -> np.ndarray:
    """Hamilton product q*h, reading each row of h as a quaternion; an isometry of S^3."""
    a, b, c, d = q
    x0, x1, x2, x3 = (h[..., i] for i in range(4))
    return np.stack([a * x0 - b * x1 - c * x2 - d * x3,
                     a * x1 + b * x0 + c * x3 - d * x2,
                     a * x2 - b * x3 + c * x0 + d * x1,
                     a * x3 + b * x2 - c * x1 + d * x0], axis=-1)


def stereographic(h: np.ndarray) -> np.ndarray:
    """sigma(x, y, z, w) = (x, y, z) / (1 - w)."""
    denom = 1.0 - h[..., 3]
    if np.any(np.abs(denom) < POLE_TOL):
        raise ProjectionPole("point too close to the projection pole w = 1")
    return h[..., :3] / denom[..., None]


def embed_point(ctx: EmbeddingCtx, s, t) -> np.ndarray:
    """R^3 image of torus point(s) (s, t); scalar input gives shape (3,)."""
    return stereographic(sphere_points(ctx, s, t))


def shear_fraction(cls: EmbeddingClass) -> Fraction:
    """Re tau' = u/w in lowest terms."""
    if cls.re_exact is not None:
        return cls.re_exact
    return Fraction(cls.tau_prime.real).limit_denominator(SHEAR_MAX_DENOMINATOR)


def generate_mesh(ctx: EmbeddingCtx, ns: int, nt: int) -> Mesh:
    """
    Regular quad grid s_i = 2*pi*i/ns, t_j = (L/2)*j/nt.

    Quads wrap directly in s; across the t-seam the top row joins row 0 shifted
    by ns*Re(tau') = ns*u/w indices, so ns must be a multiple of w.
    """
    shear = shear_fraction(ctx.cls)
    if ns <= 0 or ns % shear.denominator:
        raise ShearMisaligned(f"Ns = {ns} is not a positive multiple of the shear denominator {shear.denominator}")
    if nt < 8:
        raise ValueError(f"Nt must be at least 8, got {nt}")
    offset = ns * shear.numerator // shear.denominator

    s = 2 * math.pi * np.arange(ns) / ns
    t = (ctx.l_tot / 2) * np.arange(nt) / nt
    ss, tt = np.meshgrid(s, t)
    vertices = embed_point(ctx, ss.ravel(), tt.ravel())

    i = np.arange(ns)
    quads = []
    for j in range(nt):
        bottom = j * ns + i
        bottom_next = j * ns + (i + 1) % ns
        if j + 1 < nt:
            top, top_next = bottom + ns, bottom_next + ns
        else:
            top, top_next = (i - offset) % ns, (i + 1 - offset) % ns
        quads.append(np.stack([bottom, bottom_next, top_next, top], axis=1))
    mesh = Mesh(vertices=vertices, quads=np.concatenate(quads), ns=ns, nt=nt)
    logger.info(f"mesh {ns} x {nt}: {len(mesh.vertices)} vertices, seam shear {offset}")
    return mesh


# --- lattice points on the torus ---

def class_coords(cls: EmbeddingClass, c) -> tuple:
    """tau-coordinates of the reduced lattice to tau'-coordinates (mirror first, then the class matrix)."""
    s, t = c
    if cls.mirrored:
        s = -s
    a, b, cc, d = cls.transform
    return (a * s - b * t, -cc * s + d * t)


def _torus_st(ctx: EmbeddingCtx, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """tau'-coordinates (wrapped into [0, 1)) to torus (s, t): s' * 2*pi + t' * (f_tot + i*L/2)."""
    wrapped = coords - np.floor(coords)
    half = ctx.l_tot / 2
    t = np.minimum(wrapped[:, 1] * half, np.nextafter(half, 0))
    return 2 * math.pi * wrapped[:, 0] + wrapped[:, 1] * ctx.f_tot, t


def _flat_length(ctx: EmbeddingCtx, g) -> float:
    return abs(complex(2 * math.pi * g[0] + g[1] * ctx.f_tot, g[1] * ctx.l_tot / 2))


def shortest_representative(ctx: EmbeddingCtx, g) -> tuple[float, float]:
    """Translate of a generator by Z^2 with the shortest flat length."""
    candidates = [(g[0] + m, g[1] + n) for m in range(-2, 3) for n in range(-2, 3)]
    return min(candidates, key=lambda c: (round(_flat_length(ctx, c), 12), c))


def map_scene(ctx: EmbeddingCtx, level: LatticeLevel, mesh: Mesh | None = None,
              segments: int = 32, metadata: dict | None = None) -> Scene:
    """Places the level's points and Cayley edges on the embedded torus."""
    coords = np.array([[float(x) for x in class_coords(ctx.cls, c)] for c in level.coords])
    s, t = _torus_st(ctx, coords)
    positions = embed_point(ctx, s, t)
    markers = [Marker(position=positions[i], is_identity=(i == 0)) for i in range(len(positions))]

    generators = [shortest_representative(ctx, tuple(float(x) for x in class_coords(ctx.cls, g)))
                  for g in level.generators]
    lam = np.linspace(0.0, 1.0, segments + 1)[:, None]
    edges = []
    for source, _, tag in level.edges:
        path = coords[source] + lam * np.asarray(generators[tag])
        ps, pt = _torus_st(ctx, path)
        edges.append(EdgePolyline(positions=embed_point(ctx, ps, pt), generator=tag))
    logger.info(f"scene: {len(markers)} markers, {len(edges)} edge polylines")
    return Scene(mesh=mesh, markers=markers, edges=edges, metadata=dict(metadata or {}))
