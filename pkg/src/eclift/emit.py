"""
Writers for the artifacts the CLI produces: OBJ meshes and marker clouds,
ASCII PLY scenes, SVG figures and JSON reports.

Output is byte-reproducible. Coordinates in the geometry formats use 9
significant digits in fixed notation, JSON floats use the shortest
round-trip repr, and every file ends lines with LF. Every writer returns
bytes and can also send them to a path or an open binary stream.
"""

import json
import logging
import math
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import BinaryIO

import numpy as np

from .errors import EmptyMesh

logger = logging.getLogger(__name__)

SVG_SCALE = 400.0
SVG_MARGIN = 20.0
POINT_RADIUS = 4.0
IDENTITY_COLOR = (220, 40, 40)
MARKER_COLOR = (40, 90, 220)
MESH_COLOR = (200, 200, 200)
GENERATOR_COLORS = ((30, 160, 60), (230, 150, 20))


@dataclass(frozen=True, eq=False)
class Marker:
    position: np.ndarray
    is_identity: bool = False


@dataclass(frozen=True, eq=False)
class EdgePolyline:
    positions: np.ndarray
    generator: int


@dataclass(eq=False)
class Scene:
    """Embedded torus plus the lattice points and Cayley edges drawn on it."""
    mesh: object | None
    markers: list[Marker] = field(default_factory=list)
    edges: list[EdgePolyline] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FundamentalDomainScene:
    """Points and edges of a level in lattice coordinates (s, t), z = s + t*tau."""
    tau: complex
    coords: tuple[tuple[float, float], ...]
    edges: tuple[tuple[tuple[float, float], tuple[float, float], int], ...] = ()


def format_float(x: float) -> str:
    """Fixed notation, 9 significant digits, trailing zeros trimmed; -0 prints as 0."""
    return np.format_float_positional(float(x) + 0.0, precision=9, unique=False,
                                      fractional=False, trim='-')


class BaseWriter(ABC):
    """Renders an object to bytes; ``write_to`` sends them to a path or a binary stream."""

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    @abstractmethod
    def render(self, obj) -> bytes:
        pass

    def write_to(self, obj, target: str | os.PathLike | BinaryIO) -> bytes:
        data = self.render(obj)
        if hasattr(target, "write"):
            target.write(data)
        else:
            directory = os.path.dirname(os.fspath(target))
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(target, 'wb') as f:
                f.write(data)
            self.logger.info(f"Wrote {len(data)} bytes to {target}")
        return data


class ObjWriter(BaseWriter):
    def render(self, mesh) -> bytes:
        if mesh is None or len(mesh.vertices) == 0 or len(mesh.quads) == 0:
            raise EmptyMesh("mesh has no vertices or no faces")
        lines = [f"v {format_float(x)} {format_float(y)} {format_float(z)}" for x, y, z in mesh.vertices]
        lines += ["f " + " ".join(str(int(i) + 1) for i in quad) for quad in mesh.quads]
        return ("\n".join(lines) + "\n").encode("ascii")


class MarkerObjWriter(BaseWriter):
    """Marker positions as a point cloud: ``v`` lines then one ``p`` element per vertex."""

    def render(self, scene: Scene) -> bytes:
        if not scene.markers:
            raise EmptyMesh("scene has no markers", contract="emit.write_markers_obj")
        lines = [f"v {format_float(x)} {format_float(y)} {format_float(z)}"
                 for x, y, z in (m.position for m in scene.markers)]
        lines += [f"p {i}" for i in range(1, len(scene.markers) + 1)]
        return ("\n".join(lines) + "\n").encode("ascii")


class PlyWriter(BaseWriter):
    """
    ASCII PLY with coloured vertices: mesh vertices first, then markers, then
    the vertices of the edge polylines. Faces are the mesh quads; each polyline
    segment becomes an edge element coloured by its generator.
    """

    def render(self, scene: Scene) -> bytes:
        mesh = scene.mesh
        mesh_vertices = mesh.vertices if mesh is not None else np.empty((0, 3))
        quads = mesh.quads if mesh is not None else np.empty((0, 4), dtype=int)
        if len(mesh_vertices) == 0 and not scene.markers:
            raise EmptyMesh("scene has neither mesh vertices nor markers", contract="emit.write_ply")

        vertices = [(v, MESH_COLOR) for v in mesh_vertices]
        vertices += [(m.position, IDENTITY_COLOR if m.is_identity else MARKER_COLOR) for m in scene.markers]
        edges = []
        for poly in scene.edges:
            color = GENERATOR_COLORS[poly.generator % len(GENERATOR_COLORS)]
            start = len(vertices)
            vertices += [(v, color) for v in poly.positions]
            edges += [(start + k, start + k + 1, color) for k in range(len(poly.positions) - 1)]

        header = [
            "ply",
            "format ascii 1.0",
            "comment eclift scene",
            f"element vertex {len(vertices)}",
            "property float x", "property float y", "property float z",
            "property uchar red", "property uchar green", "property uchar blue",
            f"element face {len(quads)}",
            "property list uchar int vertex_indices",
            f"element edge {len(edges)}",
            "property int vertex1", "property int vertex2",
            "property uchar red", "property uchar green", "property uchar blue",
            "end_header",
        ]
        body = [" ".join(format_float(c) for c in v) + " {} {} {}".format(*color) for v, color in vertices]
        body += [f"4 {' '.join(str(int(i)) for i in quad)}" for quad in quads]
        body += ["{} {} {} {} {}".format(a, b, *color) for a, b, color in edges]
        return ("\n".join(header + body) + "\n").encode("ascii")


def _json_bytes(payload) -> bytes:
    return (json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _jsonable(value):
    """numpy scalars and arrays, complex numbers and tuples to plain JSON types."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, Fraction)):
        return float(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def report_dict(report) -> dict:
    curve = report.curve
    x, y = report.tau.alpha_in_tau_basis()
    return {
        "curve": {"a": curve.a, "b": curve.b, "p": curve.p},
        "a_p": report.a_p,
        "alpha": {"x": x, "y": y, "t": report.alpha.t, "p": report.alpha.p},
        "tau": {"re": report.tau.re, "im": report.tau.im},
        "levels": [
            {
                "n": level.n,
                "count": level.count,
                "d1": level.d1,
                "d2": level.d2,
                "oracle_checked": level.oracle_checked,
                "oracle_agrees": level.oracle_agrees,
                "structure_checked": level.structure_checked,
                "structure_agrees": level.structure_agrees,
            }
            for level in report.levels
        ],
        "warnings": list(report.warnings),
        "ordinary": report.ordinary,
        "conductor": report.conductor,
    }


class ReportWriter(BaseWriter):
    """LiftReport as JSON; ``alpha`` holds x, y with alpha = x + y*tau."""

    def render(self, report) -> bytes:
        return _json_bytes(report_dict(report))


class SceneJsonWriter(BaseWriter):
    """Scene metadata plus marker positions, for viewers that do not read PLY."""

    def render(self, scene: Scene) -> bytes:
        payload = {
            "metadata": _jsonable(scene.metadata),
            "markers": [{"position": _jsonable(m.position), "identity": m.is_identity} for m in scene.markers],
            "edges": len(scene.edges),
            "mesh": None if scene.mesh is None else {
                "ns": scene.mesh.ns, "nt": scene.mesh.nt,
                "vertices": len(scene.mesh.vertices), "quads": len(scene.mesh.quads),
            },
        }
        return _json_bytes(payload)


class JsonWriter(BaseWriter):
    def render(self, payload) -> bytes:
        return _json_bytes(_jsonable(payload))


# --- SVG figures ---

def split_at_cell_boundaries(start, delta) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """
    Pieces of the segment start -> start + delta in lattice coordinates, cut where
    s or t crosses an integer and each translated back into the unit cell.
    """
    cuts = {0.0, 1.0}
    for axis in range(2):
        if delta[axis] != 0:
            lo, hi = sorted((start[axis], start[axis] + delta[axis]))
            for k in range(math.floor(lo) + 1, math.ceil(hi)):
                cuts.add((k - start[axis]) / delta[axis])
    ts = sorted(c for c in cuts if 0.0 <= c <= 1.0)
    pieces = []
    for t0, t1 in zip(ts, ts[1:]):
        if t1 - t0 <= 1e-12:
            continue
        mid = [start[i] + 0.5 * (t0 + t1) * delta[i] for i in range(2)]
        shift = [math.floor(m) for m in mid]
        a = tuple(start[i] + t0 * delta[i] - shift[i] for i in range(2))
        b = tuple(start[i] + t1 * delta[i] - shift[i] for i in range(2))
        pieces.append((a, b))
    return pieces


class _SvgCanvas:
    """Maps plane coordinates to SVG pixels with the y axis flipped."""

    def __init__(self, xmin: float, xmax: float, ymin: float, ymax: float):
        self.xmin, self.ymax = xmin, ymax
        self.width = (xmax - xmin) * SVG_SCALE + 2 * SVG_MARGIN
        self.height = (ymax - ymin) * SVG_SCALE + 2 * SVG_MARGIN
        self.items: list[str] = []

    def xy(self, z: complex) -> str:
        px = (z.real - self.xmin) * SVG_SCALE + SVG_MARGIN
        py = (self.ymax - z.imag) * SVG_SCALE + SVG_MARGIN
        return f"{format_float(px)},{format_float(py)}"

    def polygon(self, pts, style: str):
        self.items.append(f'<polygon points="{" ".join(self.xy(z) for z in pts)}" style="{style}"/>')

    def polyline(self, pts, style: str):
        self.items.append(f'<polyline points="{" ".join(self.xy(z) for z in pts)}" style="{style}"/>')

    def line(self, a: complex, b: complex, style: str, extra: str = ""):
        (x1, y1), (x2, y2) = self.xy(a).split(","), self.xy(b).split(",")
        self.items.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" style="{style}"{extra}/>')

    def circle(self, z: complex, r: float, style: str):
        cx, cy = self.xy(z).split(",")
        self.items.append(f'<circle cx="{cx}" cy="{cy}" r="{format_float(r)}" style="{style}"/>')

    def render(self) -> bytes:
        w, h = format_float(self.width), format_float(self.height)
        lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">']
        lines += [f"  {item}" for item in self.items]
        lines.append("</svg>")
        return ("\n".join(lines) + "\n").encode("utf-8")


def _parallelogram_canvas(tau: complex) -> tuple[_SvgCanvas, list[complex]]:
    corners = [0j, 1 + 0j, 1 + tau, tau]
    canvas = _SvgCanvas(min(c.real for c in corners), max(c.real for c in corners),
                        min(c.imag for c in corners), max(c.imag for c in corners))
    canvas.polygon(corners, "fill: rgb(245, 245, 245); stroke: black; stroke-width: 1")
    return canvas, corners


def _rgb(color) -> str:
    return "rgb({}, {}, {})".format(*color)


class SvgWriter(BaseWriter):
    """Fundamental parallelogram {1, tau} with the level's points and Cayley edges."""

    def render(self, fd: FundamentalDomainScene) -> bytes:
        canvas, _ = _parallelogram_canvas(fd.tau)
        for start, delta, tag in fd.edges:
            color = _rgb(GENERATOR_COLORS[tag % len(GENERATOR_COLORS)])
            for a, b in split_at_cell_boundaries(start, delta):
                canvas.polyline([a[0] + a[1] * fd.tau, b[0] + b[1] * fd.tau],
                                f"fill: none; stroke: {color}; stroke-width: 1")
        for i, (s, t) in enumerate(fd.coords):
            color = IDENTITY_COLOR if i == 0 else MARKER_COLOR
            radius = 1.5 * POINT_RADIUS if i == 0 else POINT_RADIUS
            canvas.circle(s + t * fd.tau, radius, f"fill: {_rgb(color)}; stroke: black; stroke-width: 0.5")
        return canvas.render()


def fundamental_domain_scene(level) -> FundamentalDomainScene:
    """Fundamental-domain view of a LatticeLevel; generators are taken with components in (-1/2, 1/2]."""
    generators = []
    for g in level.generators:
        generators.append(tuple(float(c - math.ceil(c - 0.5)) for c in g))
    coords = tuple((float(s), float(t)) for s, t in level.coords)
    edges = tuple((coords[source], generators[tag], tag) for source, _, tag in level.edges)
    logger.debug(f"fundamental domain scene: {len(coords)} points, {len(edges)} edges")
    return FundamentalDomainScene(tau=level.tau.value, coords=coords, edges=edges)


class MultGroupSvgWriter(BaseWriter):
    """Roots of unity on the unit circle, the Cayley cycle, and the Frobenius arrows z -> z^p."""

    def render(self, group) -> bytes:
        canvas = _SvgCanvas(-1.2, 1.2, -1.2, 1.2)
        canvas.items.append(
            '<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" '
            'markerHeight="6" orient="auto"><path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>')
        points = [complex(z) for z in group.points]
        if points:
            canvas.polygon(points, "fill: none; stroke: rgb(120, 120, 120); stroke-width: 1")
        for source, target in group.arrows:
            if source == target:
                continue
            canvas.line(points[source], points[target],
                        f"stroke: {_rgb(GENERATOR_COLORS[1])}; stroke-width: 1", ' marker-end="url(#arrow)"')
        for k, z in enumerate(points):
            color = IDENTITY_COLOR if k == 0 else MARKER_COLOR
            canvas.circle(z, POINT_RADIUS, f"fill: {_rgb(color)}; stroke: black; stroke-width: 0.5")
        return canvas.render()


class RealLocusSvgWriter(BaseWriter):
    """Fundamental parallelogram with the conjugation-fixed horizontal circles drawn across it."""

    def render(self, locus) -> bytes:
        tau = locus.tau
        canvas, _ = _parallelogram_canvas(tau)
        for circle in locus.circles:
            # the parallelogram's left side at height u sits at x = u * Re(tau) / Im(tau)
            x0 = circle.offset * tau.real / tau.imag
            canvas.polyline([complex(x0, circle.offset), complex(x0 + 1, circle.offset)],
                            f"fill: none; stroke: {_rgb(IDENTITY_COLOR)}; stroke-width: 3")
        return canvas.render()


def _emit(writer: BaseWriter, obj, target) -> bytes:
    return writer.write_to(obj, target) if target is not None else writer.render(obj)


def write_obj(mesh, target=None) -> bytes:
    return _emit(ObjWriter(), mesh, target)


def write_markers_obj(scene: Scene, target=None) -> bytes:
    return _emit(MarkerObjWriter(), scene, target)


def write_ply(scene: Scene, target=None) -> bytes:
    return _emit(PlyWriter(), scene, target)


def write_svg(fd_scene: FundamentalDomainScene, target=None) -> bytes:
    return _emit(SvgWriter(), fd_scene, target)


def write_report(report, target=None) -> bytes:
    return _emit(ReportWriter(), report, target)


def write_scene_json(scene: Scene, target=None) -> bytes:
    return _emit(SceneJsonWriter(), scene, target)


def write_json(payload, target=None) -> bytes:
    return _emit(JsonWriter(), payload, target)


def mult_group_svg(group, target=None) -> bytes:
    return _emit(MultGroupSvgWriter(), group, target)


def real_locus_svg(locus, target=None) -> bytes:
    return _emit(RealLocusSvgWriter(), locus, target)
