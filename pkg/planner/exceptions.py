"""
Errors raised by the prover. Everything derives from PlannerError so the
management commands can turn any of them into a clean exit 1.
"""


class PlannerError(Exception):
    """Base class for all prover errors."""


# --- geometry ---

class GeometryError(PlannerError):
    pass


class DegeneratePolygon(GeometryError):
    """Fewer than 3 vertices, or zero area."""


class InvalidPolygon(GeometryError):
    """Polygon is not simple or not counter-clockwise."""

    def __init__(self, message, invariant):
        super().__init__(message)
        self.invariant = invariant


# --- kinematics ---

class InvalidConfiguration(PlannerError):
    """Configuration has the wrong dimension or violates a joint limit."""


# --- bitmap ---

class GridError(PlannerError):
    pass


class OutOfRange(GridError, IndexError):
    """Cell index outside the grid."""


class OutOfBounds(GridError, ValueError):
    """Configuration outside [lo, hi] on a non-wrapping axis."""


class UnsupportedDimension(GridError):
    """A 2D export was asked for without a slice that reduces the grid to 2 axes."""


# --- sampler / engine ---

class InvalidParameters(PlannerError, ValueError):
    """Prover parameters out of range, or not usable on this grid (d above 3^n - 1)."""


class Exhausted(PlannerError):
    """Every cell has been visited. Carries the stats of the partial iteration."""

    def __init__(self, stats=None):
        super().__init__('sample set exhausted')
        self.stats = stats


class StartOrGoalInObstacle(PlannerError):
    def __init__(self, which, cell, iterations=0, stats=None):
        super().__init__(f'{which} cell {tuple(cell)} lies in C-obstacle')
        self.which = which
        self.cell = tuple(cell)
        self.iterations = iterations
        self.stats = list(stats or [])


class ProofTimeout(PlannerError):
    def __init__(self, elapsed, iterations, stats=None):
        super().__init__(f'no verdict after {elapsed:.2f}s ({iterations} iterations)')
        self.elapsed = elapsed
        self.iterations = iterations
        self.stats = list(stats or [])


# --- scenario files ---

class ScenarioError(PlannerError):
    pass


class ParseError(ScenarioError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f'line {line}')
        if field:
            where.append(f'field {field!r}')
        super().__init__(f'{message} ({", ".join(where)})' if where else message)
        self.line = line
        self.field = field


class ValidationError(ScenarioError):
    def __init__(self, invariant, detail=''):
        super().__init__(f'{invariant}: {detail}' if detail else invariant)
        self.invariant = invariant
        self.detail = detail


class InvalidDelta(ScenarioError):
    pass


# --- oracle ---

class TooLarge(PlannerError):
    pass


class IncompatibleGrids(PlannerError):
    pass
