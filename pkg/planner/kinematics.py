"""
Robot models, forward kinematics R(q) and collision checking with provenance.

Two robots are supported: a rigid polygon that translates and rotates in the
plane (q = (x, y, phi)) and a planar serial chain of revolute joints
(q = joint angles, world angle of link k is the sum of the first k joints).
Link and joint indices in reports are 1-based, matching C-space axis numbers.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .exceptions import InvalidConfiguration, ValidationError
from .geometry import (
    Point2, Polygon2, Triangle2, boxes_overlap, point_in_polygon,
    polys_collide, rotate_translate, triangle_bounds, triangles_bounds, triangulate,
)

TWO_PI = 2.0 * math.pi
# Link width as a fraction of link length when a scene does not give one
DEFAULT_LINK_WIDTH_RATIO = 0.05


@dataclass(frozen=True)
class Link:
    length: float
    width: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValidationError('link length', f'must be > 0, got {self.length}')
        if not self.width > 0:
            raise ValidationError('link width', f'must be > 0, got {self.width}')


@dataclass(frozen=True)
class SerialChain:
    base: Point2
    links: tuple
    # one entry per joint: None (full circle, wraps) or (lo, hi) in radians
    joint_limits: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'base', Point2(*self.base))
        object.__setattr__(self, 'links', tuple(self.links))
        limits = tuple(self.joint_limits) or (None,) * len(self.links)
        object.__setattr__(self, 'joint_limits', limits)
        if not self.links:
            raise ValidationError('chain links', 'a chain needs at least one link')
        if len(limits) != len(self.links):
            raise ValidationError('joint limits', f'{len(limits)} limits for {len(self.links)} joints')
        for k, lim in enumerate(limits, start=1):
            if lim is not None and not lim[0] < lim[1]:
                raise ValidationError('joint limits', f'joint {k}: lo must be < hi, got {lim}')

    kind = 'serial_chain'

    @property
    def dof(self):
        return len(self.links)

    def truncated(self, k):
        """The chain restricted to its first k links; later joints leave the C-space."""
        if not 1 <= k <= self.dof:
            raise ValidationError('truncate_to_links', f'must be in 1..{self.dof}, got {k}')
        return SerialChain(self.base, self.links[:k], self.joint_limits[:k])


@dataclass(frozen=True)
class RigidSE2:
    body: Polygon2
    reference_point: Point2
    # cached body-frame triangulation
    _triangles: tuple = field(default=(), init=False, repr=False, compare=False)

    kind = 'rigid_se2'

    def __post_init__(self):
        object.__setattr__(self, 'reference_point', Point2(*self.reference_point))
        object.__setattr__(self, '_triangles', tuple(triangulate(self.body)))

    @property
    def dof(self):
        return 3

    @property
    def axis_on_body(self):
        """Whether the rotation axis lies on the robot; the all-rotations rule needs it."""
        return point_in_polygon(self.reference_point, self.body)


RobotModel = Union[SerialChain, RigidSE2]


@dataclass(frozen=True)
class Obstacle:
    """A workspace obstacle with its triangulation prepared once."""
    id: str
    polygon: Polygon2
    triangles: tuple = field(default=(), init=False, repr=False, compare=False)
    boxes: tuple = field(default=(), init=False, repr=False, compare=False)
    bounds: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        tris = tuple(triangulate(self.polygon))
        object.__setattr__(self, 'triangles', tris)
        object.__setattr__(self, 'boxes', tuple(triangle_bounds(t) for t in tris))
        object.__setattr__(self, 'bounds', self.polygon.bounds)

    def scaled(self, factor):
        return Obstacle(self.id, self.polygon.scaled(factor))


# --- collision causes ---

@dataclass(frozen=True)
class ObstacleHit:
    link: int
    obstacle_id: str


@dataclass(frozen=True)
class SelfHit:
    i: int
    j: int


@dataclass(frozen=True)
class BaseInObstacle:
    obstacle_id: str


@dataclass(frozen=True)
class CollisionReport:
    colliding: bool
    cause: Optional[Union[ObstacleHit, SelfHit, BaseInObstacle]] = None

    def __post_init__(self):
        if self.colliding != (self.cause is not None):
            raise ValueError('cause must be set exactly when colliding')


FREE = CollisionReport(False, None)


def _validate(robot, q):
    if len(q) != robot.dof:
        raise InvalidConfiguration(f'expected {robot.dof} values, got {len(q)}')
    if not all(math.isfinite(v) for v in q):
        raise InvalidConfiguration(f'non-finite configuration {tuple(q)}')
    if isinstance(robot, SerialChain):
        for k, (value, lim) in enumerate(zip(q, robot.joint_limits), start=1):
            if lim is not None and not lim[0] <= value <= lim[1]:
                raise InvalidConfiguration(f'joint {k} = {value} outside limits {lim}')


def joint_positions(chain: SerialChain, q):
    """Base, every joint and the tip, in order (len = dof + 1)."""
    x, y = chain.base
    angle = 0.0
    points = [Point2(x, y)]
    for link, qi in zip(chain.links, q):
        angle += qi
        x += link.length * math.cos(angle)
        y += link.length * math.sin(angle)
        points.append(Point2(x, y))
    return points


def link_triangles(chain: SerialChain, q):
    """Per-link rectangles, each split into two triangles."""
    joints = joint_positions(chain, q)
    out = []
    angle = 0.0
    for k, (link, qi) in enumerate(zip(chain.links, q)):
        angle += qi
        h = 0.5 * link.width
        nx, ny = -math.sin(angle) * h, math.cos(angle) * h
        p0, p1 = joints[k], joints[k + 1]
        r0 = Point2(p0.x - nx, p0.y - ny)
        r1 = Point2(p1.x - nx, p1.y - ny)
        r2 = Point2(p1.x + nx, p1.y + ny)
        r3 = Point2(p0.x + nx, p0.y + ny)
        out.append([Triangle2(r0, r1, r2), Triangle2(r0, r2, r3)])
    return out


def body_triangles(robot: RigidSE2, q):
    x, y, phi = q
    pivot, target = robot.reference_point, (x, y)
    return [
        Triangle2(*(rotate_translate(p, phi, pivot, target) for p in tri))
        for tri in robot._triangles
    ]


def placement(robot: RobotModel, q):
    """R(q) as a flat list of world-frame triangles."""
    _validate(robot, q)
    if isinstance(robot, SerialChain):
        return [t for tris in link_triangles(robot, q) for t in tris]
    return body_triangles(robot, q)


def _hits(triangles, box, obstacle):
    return boxes_overlap(box, obstacle.bounds) and polys_collide(
        triangles, obstacle.triangles, b_boxes=obstacle.boxes,
    )


def collision_check(robot: RobotModel, q, obstacles) -> CollisionReport:
    """
    Collision verdict with its cause.

    Priority is BaseInObstacle > ObstacleHit > SelfHit. For chains, links are
    tried in increasing order, so ObstacleHit names the smallest colliding link.
    """
    _validate(robot, q)
    if isinstance(robot, SerialChain):
        return _check_chain(robot, q, obstacles)
    return _check_rigid(robot, q, obstacles)


def _check_chain(chain, q, obstacles):
    links = link_triangles(chain, q)
    boxes = [triangles_bounds(tris) for tris in links]
    for j, (tris, box) in enumerate(zip(links, boxes), start=1):
        for obstacle in obstacles:
            if _hits(tris, box, obstacle):
                return CollisionReport(True, ObstacleHit(j, obstacle.id))
    # adjacent links share a joint and always touch
    n = len(links)
    for i in range(n):
        for j in range(i + 2, n):
            if boxes_overlap(boxes[i], boxes[j]) and polys_collide(links[i], links[j]):
                return CollisionReport(True, SelfHit(i + 1, j + 1))
    return FREE


def _check_rigid(robot, q, obstacles):
    tris = body_triangles(robot, q)
    box = triangles_bounds(tris)
    hit = next((o for o in obstacles if _hits(tris, box, o)), None)
    if hit is None:
        return FREE
    if robot.axis_on_body:
        axis = (q[0], q[1])
        for obstacle in obstacles:
            if point_in_polygon(axis, obstacle.polygon):
                return CollisionReport(True, BaseInObstacle(obstacle.id))
    return CollisionReport(True, ObstacleHit(1, hit.id))
