"""
Klein-disk pictures of Dirichlet domains.

A half-space p·n >= 0 is affine in the Klein chart, so a planar section of
the domain is a convex polygon: the intersection of the half-planes with a
polygonal approximation of the unit disk.
"""
import logging
import re
from typing import List, Optional, Tuple

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from scipy.optimize import linprog  # noqa: E402
from scipy.spatial import HalfspaceIntersection  # noqa: E402

from app.errors import UnsupportedDimension  # noqa: E402
from app.geometry.lorentz import klein_project, lorentz_form  # noqa: E402
from app.models.reports import DomainReport  # noqa: E402

logger = logging.getLogger(__name__)

DISK_SIDES = 256
DISK_RADIUS = 0.999
PLANE_PATTERN = re.compile(r'^k(\d+)\s*=\s*([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)$')


def parse_plane(spec: Optional[str], n: int) -> Optional[Tuple[int, float]]:
    """
    Read a section spec 'k<i>=<value>' fixing Klein coordinate i (1-based).

    None (or any spec in H²) means the whole disk.

    Raises:
        ValueError: If the spec is malformed or names a missing coordinate
        UnsupportedDimension: For n > 3
    """
    if n == 2:
        return None
    if n != 3:
        raise UnsupportedDimension(f"Pictures are drawn for n = 2 or 3, got n = {n}")
    spec = spec or 'k3=0'
    match = PLANE_PATTERN.match(spec.strip())
    if not match:
        raise ValueError(f"Plane spec {spec!r} is not of the form k<i>=<value>")
    axis, value = int(match.group(1)), float(match.group(2))
    if not 1 <= axis <= n:
        raise ValueError(f"Klein coordinate k{axis} does not exist for n = {n}")
    if abs(value) >= 1.0:
        raise ValueError(f"Section k{axis}={value} misses the unit ball")
    return axis, value


def _section_halfspaces(report: DomainReport, section: Optional[Tuple[int, float]]):
    """Half-planes A u + b <= 0 of the section, one per contributor, then the disk sides."""
    size = report.dimension + 1
    J = lorentz_form(size)
    keep = list(range(1, size))
    offset = np.zeros(len(report.contributors))
    radius = DISK_RADIUS
    covectors = np.array([J @ np.asarray(c.normal) for c in report.contributors])
    if section is not None:
        axis, value = section
        keep.remove(axis)
        offset = covectors[:, axis] * value
        radius = DISK_RADIUS * np.sqrt(1.0 - value ** 2)
    # c0 + c·k >= 0 becomes -c·u - (c0 + offset) <= 0
    rows = np.hstack([-covectors[:, keep], -(covectors[:, 0] + offset)[:, None]])
    angles = np.linspace(0.0, 2 * np.pi, DISK_SIDES, endpoint=False)
    disk = np.column_stack([np.cos(angles), np.sin(angles), -radius * np.ones(DISK_SIDES)])
    return np.vstack([rows, disk])


def _interior_point(halfspaces: np.ndarray) -> Optional[np.ndarray]:
    """Chebyshev center of the polygon, None if it is empty."""
    A, b = halfspaces[:, :-1], halfspaces[:, -1]
    norms = np.linalg.norm(A, axis=1)
    cost = np.zeros(A.shape[1] + 1)
    cost[-1] = -1.0
    result = linprog(cost, A_ub=np.hstack([A, norms[:, None]]), b_ub=-b,
                     bounds=[(None, None)] * A.shape[1] + [(0, None)])
    if not result.success or result.x[-1] <= 1e-9:
        return None
    return result.x[:-1]


def section_polygon(report: DomainReport, plane: Optional[str] = None) -> Tuple[np.ndarray, List[Optional[str]]]:
    """
    Vertices of the domain section in counterclockwise order, with the word of each edge.

    An edge on the disk boundary carries None.

    Raises:
        ValueError: If the section misses the domain
    """
    section = parse_plane(plane, report.dimension)
    halfspaces = _section_halfspaces(report, section)
    center = _interior_point(halfspaces)
    if center is None:
        raise ValueError(f"Section {plane or 'disk'} does not meet the domain")
    hs = HalfspaceIntersection(halfspaces, center)
    vertices = np.unique(np.round(hs.intersections, 12), axis=0)
    order = np.argsort(np.arctan2(vertices[:, 1] - center[1], vertices[:, 0] - center[0]))
    vertices = vertices[order]

    words: List[Optional[str]] = []
    count = len(report.contributors)
    for a, b in zip(vertices, np.roll(vertices, -1, axis=0)):
        mid = (a + b) / 2
        slack = halfspaces[:count, :-1] @ mid + halfspaces[:count, -1]
        scale = np.linalg.norm(halfspaces[:count, :-1], axis=1)
        i = int(np.argmax(slack / scale)) if count else -1
        words.append(report.contributors[i].word if count and slack[i] >= -1e-7 * scale[i] else None)
    return vertices, words


def render_domain_svg(report: DomainReport, plane: Optional[str], out: str) -> np.ndarray:
    """
    Draw a Klein-disk section of a domain report as an SVG file.

    Args:
        report: DomainReport of a domain in H² or H³
        plane: Section spec 'k<i>=<value>' for H³; ignored in H²
        out: Output path

    Returns:
        The polygon vertices in Klein coordinates of the section
    """
    vertices, words = section_polygon(report, plane)
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.add_patch(plt.Circle((0.0, 0.0), 1.0, fill=False, color='black', linewidth=0.8))
    ax.fill(vertices[:, 0], vertices[:, 1], color='tab:blue', alpha=0.25)
    for (a, b), word in zip(zip(vertices, np.roll(vertices, -1, axis=0)), words):
        if word is None:
            continue
        ax.plot([a[0], b[0]], [a[1], b[1]], color='tab:blue', linewidth=1.5)
        mid = (a + b) / 2
        ax.annotate(word, mid, fontsize=8, ha='center', va='center')

    base = klein_project(report.base)
    section = parse_plane(plane, report.dimension)
    if section is not None:
        base = np.delete(base, section[0] - 1)
    ax.scatter([base[0]], [base[1]], color='tab:red', s=12, zorder=3)
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect('equal')
    ax.set_title(f"Dirichlet domain section ({plane or 'disk'})" if section else "Dirichlet domain")
    ax.axis('off')
    fig.savefig(out, format='svg')
    plt.close(fig)
    logger.info(f"Saved domain picture with {len(vertices)} vertices to {out}")
    return vertices
