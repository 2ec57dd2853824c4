"""
Exact-enough 2D primitives for the collision kernel.

Everything here works on closed sets: two shapes that only touch are
reported as intersecting. Coordinates are plain floats; there is no robust
arithmetic, degeneracies fall on the closed-set side.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .exceptions import DegeneratePolygon, InvalidPolygon

AREA_EPS = 1e-12
BOUNDARY_EPS = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class Triangle2(NamedTuple):
    a: Point2
    b: Point2
    c: Point2

    def signed_area(self):
        return 0.5 * _cross(self.a, self.b, self.c)


# (min_x, min_y, max_x, max_y)
Box = tuple


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def shoelace_area(points):
    """Signed area, positive for counter-clockwise order."""
    total = 0.0
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return 0.5 * total


def _segments_intersect(p1, p2, q1, q2):
    """Closed segment intersection, collinear overlap included."""
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False


def _on_segment(a, b, p, eps=BOUNDARY_EPS):
    return (min(a[0], b[0]) - eps <= p[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= p[1] <= max(a[1], b[1]) + eps)


@dataclass(frozen=True)
class Polygon2:
    """Simple polygon with counter-clockwise vertices. Validated on construction."""
    vertices: tuple

    def __post_init__(self):
        pts = tuple(Point2(float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, 'vertices', pts)
        if len(pts) < 3:
            raise DegeneratePolygon(f'polygon needs at least 3 vertices, got {len(pts)}')
        if not all(math.isfinite(c) for p in pts for c in p):
            raise InvalidPolygon('polygon has a non-finite coordinate', 'finite coordinates')
        area = shoelace_area(pts)
        if abs(area) <= AREA_EPS:
            raise DegeneratePolygon('polygon has zero area')
        if area < 0:
            raise InvalidPolygon('vertices are clockwise', 'polygon orientation')
        if not _is_simple(pts):
            raise InvalidPolygon('edges cross each other', 'polygon simplicity')

    @property
    def area(self):
        return shoelace_area(self.vertices)

    @property
    def bounds(self):
        return points_bounds(self.vertices)

    def scaled(self, factor):
        """The same shape scaled about its vertex mean; the area scales by factor**2."""
        n = len(self.vertices)
        cx = sum(p[0] for p in self.vertices) / n
        cy = sum(p[1] for p in self.vertices) / n
        return Polygon2([(cx + factor * (x - cx), cy + factor * (y - cy)) for x, y in self.vertices])

    def edges(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def min_edge_length(self):
        return min(math.dist(a, b) for a, b in self.edges())


def _is_simple(pts):
    n = len(pts)
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            # neighbours share a vertex by construction
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_intersect(*edges[i], *edges[j]):
                return False
    return True


def points_bounds(points) -> Box:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs), max(ys))


def triangle_bounds(t) -> Box:
    (ax, ay), (bx, by), (cx, cy) = t
    return (min(ax, bx, cx), min(ay, by, cy), max(ax, bx, cx), max(ay, by, cy))


def boxes_union(boxes) -> Box:
    boxes = list(boxes)
    return (min(b[0] for b in boxes), min(b[1] for b in boxes),
            max(b[2] for b in boxes), max(b[3] for b in boxes))


def triangles_bounds(triangles) -> Box:
    return boxes_union(triangle_bounds(t) for t in triangles)


def boxes_overlap(b1: Box, b2: Box) -> bool:
    return b1[0] <= b2[2] and b2[0] <= b1[2] and b1[1] <= b2[3] and b2[1] <= b1[3]


def _point_in_triangle_closed(p, a, b, c):
    d1 = _cross(a, b, p)
    d2 = _cross(b, c, p)
    d3 = _cross(c, a, p)
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


def triangulate(poly: Polygon2):
    """Ear clipping. Returns len(vertices) - 2 counter-clockwise triangles."""
    pts = list(poly.vertices)
    if len(pts) < 3:
        raise DegeneratePolygon('polygon needs at least 3 vertices')
    if abs(shoelace_area(pts)) <= AREA_EPS:
        raise DegeneratePolygon('polygon has zero area')

    remaining = list(range(len(pts)))
    triangles = []
    while len(remaining) > 3:
        k = _find_ear(pts, remaining, strict=True)
        if k is None:
            # only collinear runs left; clip one as a zero-area triangle
            k = _find_ear(pts, remaining, strict=False)
        if k is None:
            raise DegeneratePolygon('no ear found; polygon is not simple')
        m = len(remaining)
        i_prev, i, i_next = remaining[k - 1], remaining[k], remaining[(k + 1) % m]
        triangles.append(Triangle2(pts[i_prev], pts[i], pts[i_next]))
        del remaining[k]
    triangles.append(Triangle2(*(pts[i] for i in remaining)))
    return triangles


def _find_ear(pts, remaining, strict):
    m = len(remaining)
    for k in range(m):
        i_prev, i, i_next = remaining[k - 1], remaining[k], remaining[(k + 1) % m]
        a, b, c = pts[i_prev], pts[i], pts[i_next]
        turn = _cross(a, b, c)
        if strict:
            if turn <= 0:
                continue
            blocked = any(
                _point_in_triangle_closed(pts[j], a, b, c)
                for j in remaining if j not in (i_prev, i, i_next)
            )
            if blocked:
                continue
        elif turn != 0:
            continue
        return k
    return None


def _projection(t, nx, ny):
    d0 = t[0][0] * nx + t[0][1] * ny
    d1 = t[1][0] * nx + t[1][1] * ny
    d2 = t[2][0] * nx + t[2][1] * ny
    return min(d0, d1, d2), max(d0, d1, d2)


def _separating_axis_from(t, other):
    degenerate = _cross(t[0], t[1], t[2]) == 0
    for i in range(3):
        p, q = t[i], t[(i + 1) % 3]
        ex, ey = q[0] - p[0], q[1] - p[1]
        axes = ((ey, -ex), (ex, ey)) if degenerate else ((ey, -ex),)
        for nx, ny in axes:
            if nx == 0 and ny == 0:
                continue
            lo1, hi1 = _projection(t, nx, ny)
            lo2, hi2 = _projection(other, nx, ny)
            if hi1 < lo2 or hi2 < lo1:
                return True
    return False


def tri_intersects(t1, t2) -> bool:
    """True iff the closed triangles share at least one point (separating axis test)."""
    return not (_separating_axis_from(t1, t2) or _separating_axis_from(t2, t1))


def point_in_polygon(p, poly: Polygon2) -> bool:
    """Ray casting; points on the boundary count as inside."""
    px, py = p
    verts = poly.vertices
    n = len(verts)
    inside = False
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        if abs(_cross((x1, y1), (x2, y2), (px, py))) <= BOUNDARY_EPS and _on_segment((x1, y1), (x2, y2), (px, py)):
            return True
        if (y1 > py) != (y2 > py):
            x_cross = (x2 - x1) * (py - y1) / (y2 - y1) + x1
            if px < x_cross:
                inside = not inside
    return inside


def polys_collide(a: Sequence, b: Sequence, prefilter=True, b_boxes: Optional[Sequence[Box]] = None) -> bool:
    """
    True iff any triangle of `a` intersects any triangle of `b`.

    With `prefilter`, whole-set and per-triangle bounding boxes skip pairs that
    cannot touch; the verdict is the same either way. `b_boxes` lets callers
    pass precomputed boxes for `b` (obstacles are prepared once per scene).
    """
    if not prefilter:
        return any(tri_intersects(t1, t2) for t1 in a for t2 in b)
    if b_boxes is None:
        b_boxes = [triangle_bounds(t) for t in b]
    a_boxes = [triangle_bounds(t) for t in a]
    if not boxes_overlap(boxes_union(a_boxes), boxes_union(b_boxes)):
        return False
    for t1, box1 in zip(a, a_boxes):
        for t2, box2 in zip(b, b_boxes):
            if boxes_overlap(box1, box2) and tri_intersects(t1, t2):
                return True
    return False


def rotate_translate(p, angle, pivot, target):
    """Rotate p by `angle` about `pivot`, then move pivot onto `target`."""
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = p[0] - pivot[0], p[1] - pivot[1]
    return Point2(target[0] + c * dx - s * dy, target[1] + s * dx + c * dy)
