"""
Scenario files: JSON documents describing a robot, its obstacles, the query
and the grid. See SCENARIOS.md for the schema.

Angles are radians; a string with a "deg" suffix ("90deg") is read as degrees.
Everything is validated at load time, so a Scenario object is always usable.
"""
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .bitmap import TWO_PI, GridSpec, config_to_cell
from .exceptions import (
    DegeneratePolygon, GridError, InvalidDelta, InvalidPolygon, OutOfBounds,
    ParseError, ValidationError,
)
from .geometry import Polygon2
from .kinematics import DEFAULT_LINK_WIDTH_RATIO, Link, Obstacle, RigidSE2, RobotModel, SerialChain

logger = logging.getLogger(__name__)

# tolerance when rounding a resolution that should come out integral
RESOLUTION_EPS = 1e-9


@dataclass(frozen=True)
class Scenario:
    name: str
    robot: RobotModel
    obstacles: tuple
    start: tuple
    goal: tuple
    # int (same on every axis), a tuple per axis, or None to derive it from delta
    resolution: object = None
    delta: Optional[float] = None
    # ((xlo, xhi), (ylo, yhi)) for rigid robots
    workspace: Optional[tuple] = None
    truncate_to_links: Optional[int] = None
    grid: GridSpec = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'obstacles', tuple(self.obstacles))
        object.__setattr__(self, 'start', tuple(float(v) for v in self.start))
        object.__setattr__(self, 'goal', tuple(float(v) for v in self.goal))
        if isinstance(self.resolution, (list, tuple)):
            object.__setattr__(self, 'resolution', tuple(int(n) for n in self.resolution))

        ids = [o.id for o in self.obstacles]
        if len(set(ids)) != len(ids):
            raise ValidationError('obstacle ids unique', f'duplicate ids in {ids}')
        for which, q in (('start', self.start), ('goal', self.goal)):
            if len(q) != self.robot.dof:
                raise ValidationError(f'{which} dimension', f'{len(q)} values for a {self.robot.dof}-DOF robot')
        if self.truncate_to_links is not None:
            if not isinstance(self.robot, SerialChain):
                raise ValidationError('truncate_to_links', 'only serial chains can be truncated')
            self.robot.truncated(self.truncate_to_links)

        object.__setattr__(self, 'grid', self._build_grid())
        for which, q in (('start', self.active_start), ('goal', self.active_goal)):
            try:
                config_to_cell(self.grid, q)
            except OutOfBounds as exc:
                raise ValidationError(f'{which} within bounds', str(exc)) from exc

    @property
    def active_robot(self):
        """The robot the grid is built for (the truncated chain in truncation mode)."""
        if self.truncate_to_links is None:
            return self.robot
        return self.robot.truncated(self.truncate_to_links)

    @property
    def active_start(self):
        return self.start[:self.active_robot.dof]

    @property
    def active_goal(self):
        return self.goal[:self.active_robot.dof]

    @property
    def start_cell(self):
        return config_to_cell(self.grid, self.active_start)

    @property
    def goal_cell(self):
        return config_to_cell(self.grid, self.active_goal)

    def with_options(self, resolution=None, truncate_to_links=None, obstacle_scale=None):
        """
        A copy with the resolution or truncation overridden; None keeps the current value.

        `obstacle_scale` scales every obstacle about its vertex mean, so the
        obstacle area changes by its square.
        """
        changes = {}
        if resolution is not None:
            changes['resolution'] = resolution
        if truncate_to_links is not None:
            changes['truncate_to_links'] = truncate_to_links
        if obstacle_scale is not None and obstacle_scale != 1:
            if not (math.isfinite(obstacle_scale) and obstacle_scale > 0):
                raise ValidationError('obstacle scale', f'must be a positive number, got {obstacle_scale}')
            changes['obstacles'] = tuple(o.scaled(obstacle_scale) for o in self.obstacles)
        return replace(self, **changes) if changes else self

    def _build_grid(self):
        robot = self.active_robot
        if isinstance(robot, RigidSE2):
            if self.workspace is None:
                raise ValidationError('rigid workspace', 'a rigid robot needs grid.workspace')
            (xlo, xhi), (ylo, yhi) = self.workspace
            lo, hi, wrap = (xlo, ylo, 0.0), (xhi, yhi, TWO_PI), (False, False, True)
            if self.resolution is None:
                raise ValidationError('grid resolution', 'a rigid robot needs an explicit resolution')
        else:
            lo, hi, wrap = [], [], []
            for lim in robot.joint_limits:
                lo.append(0.0 if lim is None else lim[0])
                hi.append(TWO_PI if lim is None else lim[1])
                wrap.append(lim is None)
        dims = self._dims(robot)
        try:
            return GridSpec(dims, wrap, lo, hi)
        except GridError as exc:
            raise ValidationError('grid', str(exc)) from exc

    def _dims(self, robot):
        if self.resolution is None:
            delta = self.delta if self.delta is not None else default_delta(self.obstacles)
            return suggest_resolution(robot, delta)
        if isinstance(self.resolution, int):
            return (self.resolution,) * robot.dof
        if len(self.resolution) != robot.dof:
            raise ValidationError('grid dimension', f'{len(self.resolution)} resolutions for {robot.dof} axes')
        return self.resolution


def default_delta(obstacles):
    """Smallest obstacle edge length, the default feature size."""
    if not obstacles:
        raise ValidationError('grid resolution', 'without obstacles a resolution or delta must be given')
    return min(o.polygon.min_edge_length() for o in obstacles)


def suggest_resolution(robot: SerialChain, delta):
    """
    Per-axis resolution whose angular step keeps every link tip within `delta`
    of the neighbouring cell: step < delta / total link length.
    """
    if not (isinstance(delta, (int, float)) and math.isfinite(delta) and delta > 0):
        raise InvalidDelta(f'delta must be a positive finite number, got {delta!r}')
    theta = delta / sum(link.length for link in robot.links)
    dims = []
    for lim in robot.joint_limits:
        span = TWO_PI if lim is None else lim[1] - lim[0]
        dims.append(max(2, math.ceil(span / theta - RESOLUTION_EPS)))
    return tuple(dims)


# --- reading ---

def _angle(value, where):
    if isinstance(value, bool):
        raise ParseError('expected an angle', field=where)
    angle = None
    if isinstance(value, (int, float)):
        angle = float(value)
    elif isinstance(value, str):
        text = value.strip().lower()
        try:
            if text.endswith('deg'):
                angle = math.radians(float(text[:-3]))
            elif text.endswith('rad'):
                angle = float(text[:-3])
            else:
                angle = float(text)
        except ValueError:
            pass
    # nan and inf parse as floats
    if angle is None or not math.isfinite(angle):
        raise ParseError(f'not an angle: {value!r}', field=where)
    return angle


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f'expected a number, got {value!r}', field=where)
    if not math.isfinite(value):
        raise ParseError(f'expected a finite number, got {value!r}', field=where)
    return float(value)


def _require(doc, key, where):
    if not isinstance(doc, dict):
        raise ParseError('expected an object', field=where)
    if key not in doc:
        raise ParseError('missing field', field=f'{where}.{key}' if where else key)
    return doc[key]


def _list(value, where):
    if not isinstance(value, list):
        raise ParseError('expected a list', field=where)
    return value


def _point(value, where):
    pair = _list(value, where)
    if len(pair) != 2:
        raise ParseError('expected [x, y]', field=where)
    return (_number(pair[0], f'{where}[0]'), _number(pair[1], f'{where}[1]'))


def _polygon(vertices, where):
    points = [_point(v, f'{where}[{k}]') for k, v in enumerate(_list(vertices, where))]
    try:
        return Polygon2(points)
    except InvalidPolygon as exc:
        raise ValidationError(exc.invariant, f'{where}: {exc}') from exc
    except DegeneratePolygon as exc:
        raise ValidationError('polygon non-degenerate', f'{where}: {exc}') from exc


def _robot(doc):
    kind = _require(doc, 'kind', 'robot')
    if kind == 'serial_chain':
        links = []
        for k, entry in enumerate(_list(_require(doc, 'links', 'robot'), 'robot.links')):
            where = f'robot.links[{k}]'
            length = _number(_require(entry, 'length', where), f'{where}.length')
            width = entry.get('width')
            width = length * DEFAULT_LINK_WIDTH_RATIO if width is None else _number(width, f'{where}.width')
            links.append(Link(length, width))
        limits = []
        for k, lim in enumerate(_list(doc.get('joint_limits', [None] * len(links)), 'robot.joint_limits')):
            where = f'robot.joint_limits[{k}]'
            if lim is None:
                limits.append(None)
                continue
            pair = _list(lim, where)
            if len(pair) != 2:
                raise ParseError('expected [lo, hi] or null', field=where)
            limits.append((_angle(pair[0], f'{where}[0]'), _angle(pair[1], f'{where}[1]')))
        base = _point(doc.get('base', [0.0, 0.0]), 'robot.base')
        return SerialChain(base, links, limits)
    if kind == 'rigid_se2':
        body = _polygon(_require(doc, 'body', 'robot'), 'robot.body')
        reference = _point(doc.get('reference_point', [0.0, 0.0]), 'robot.reference_point')
        return RigidSE2(body, reference)
    raise ParseError(f'unknown robot kind {kind!r}', field='robot.kind')


def _obstacles(items):
    out = []
    for k, entry in enumerate(_list(items, 'obstacles')):
        where = f'obstacles[{k}]'
        ident = str(_require(entry, 'id', where))
        out.append(Obstacle(ident, _polygon(_require(entry, 'vertices', where), f'{where}.vertices')))
    return out


def _resolution(value):
    if value is None:
        return None
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    items = _list(value, 'grid.resolution')
    for k, n in enumerate(items):
        if isinstance(n, bool) or not isinstance(n, int):
            raise ParseError('expected an integer', field=f'grid.resolution[{k}]')
    return tuple(items)


def scenario_from_dict(doc, name=''):
    if not isinstance(doc, dict):
        raise ParseError('a scenario must be a JSON object')
    robot = _robot(_require(doc, 'robot', ''))
    obstacles = _obstacles(doc.get('obstacles', []))
    start = [_angle(v, f'start[{k}]') for k, v in enumerate(_list(_require(doc, 'start', ''), 'start'))]
    goal = [_angle(v, f'goal[{k}]') for k, v in enumerate(_list(_require(doc, 'goal', ''), 'goal'))]
    grid = doc.get('grid', {})
    if not isinstance(grid, dict):
        raise ParseError('expected an object', field='grid')
    delta = grid.get('delta')
    if delta is not None:
        delta = _number(delta, 'grid.delta')
    workspace = grid.get('workspace')
    if workspace is not None:
        axes = _list(workspace, 'grid.workspace')
        if len(axes) != 2:
            raise ParseError('expected [[xlo, xhi], [ylo, yhi]]', field='grid.workspace')
        workspace = tuple(_point(axis, f'grid.workspace[{k}]') for k, axis in enumerate(axes))
    truncate = doc.get('truncate_to_links')
    if truncate is not None and (isinstance(truncate, bool) or not isinstance(truncate, int)):
        raise ParseError('expected an integer', field='truncate_to_links')
    return Scenario(
        name=str(doc.get('name', name)),
        robot=robot,
        obstacles=obstacles,
        start=start,
        goal=goal,
        resolution=_resolution(grid.get('resolution')),
        delta=delta,
        workspace=workspace,
        truncate_to_links=truncate,
    )


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    scenario = scenario_from_dict(doc, name=Path(path).stem)
    logger.debug('Loaded scenario %s: %s, grid %s', scenario.name, scenario.robot.kind, scenario.grid.dims)
    return scenario


# --- writing ---

def scenario_to_dict(scenario: Scenario):
    robot = scenario.robot
    if isinstance(robot, SerialChain):
        robot_doc = {
            'kind': 'serial_chain',
            'base': list(robot.base),
            'links': [{'length': link.length, 'width': link.width} for link in robot.links],
            'joint_limits': [None if lim is None else list(lim) for lim in robot.joint_limits],
        }
    else:
        robot_doc = {
            'kind': 'rigid_se2',
            'body': [list(p) for p in robot.body.vertices],
            'reference_point': list(robot.reference_point),
        }
    grid = {}
    if scenario.resolution is not None:
        res = scenario.resolution
        grid['resolution'] = res if isinstance(res, int) else list(res)
    if scenario.delta is not None:
        grid['delta'] = scenario.delta
    if scenario.workspace is not None:
        grid['workspace'] = [list(axis) for axis in scenario.workspace]
    doc = {
        'name': scenario.name,
        'robot': robot_doc,
        'obstacles': [
            {'id': o.id, 'vertices': [list(p) for p in o.polygon.vertices]} for o in scenario.obstacles
        ],
        'start': list(scenario.start),
        'goal': list(scenario.goal),
        'grid': grid,
    }
    if scenario.truncate_to_links is not None:
        doc['truncate_to_links'] = scenario.truncate_to_links
    return doc


def save_scenario(scenario: Scenario, path):
    with open(path, 'w') as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write('\n')
