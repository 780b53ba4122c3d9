import numpy as np

from ..kernels import as_points
from ..space.grid import GridFunction


class GluedFunction(object):
    '''phi on the closed ball B_radius(x0), the ambient function u everywhere else.

    The principal-value engine recognizes this shape: for an analytic ambient the
    near zone is phi and the outer integral runs over u; for a grid ambient the
    lattice carries lattice_values() and phi supplies the node's own cell.
    '''
    def __init__(self, test, ambient, x0=None, radius=None):
        base = getattr(test, 'base', test)
        self.test = base
        self.ambient = ambient
        self.n = base.n
        x0 = getattr(test, 'x0', None) if x0 is None else x0
        radius = getattr(test, 'radius', None) if radius is None else radius
        if x0 is None or radius is None:
            raise ValueError('a glued function needs a touch point and a radius')
        self.x0 = np.atleast_1d(np.asarray(x0, dtype=float)).reshape(self.n)
        self.radius = float(radius)

    def __repr__(self):
        return (f'GluedFunction({self.test!r} on B_{self.radius}({self.x0.tolist()}), '
                f'{self.ambient!r})')

    @property
    def on_grid(self):
        return isinstance(self.ambient, GridFunction)

    def inside(self, points):
        return np.linalg.norm(points - self.x0, axis=-1) <= self.radius

    def evaluate(self, x):
        points, scalar = as_points(x, self.n)
        shape = points.shape[:-1]
        points = points.reshape(-1, self.n)
        inside = self.inside(points)
        out = np.empty(len(points))
        if np.any(inside):
            out[inside] = self.test.value(points[inside])
        if np.any(~inside):
            out[~inside] = self.ambient.evaluate(points[~inside])
        out = out.reshape(shape)
        return float(out.reshape(-1)[0]) if scalar else out

    value = evaluate
    __call__ = evaluate

    def lattice_values(self):
        '''Flat lattice values with phi substituted at the active nodes of the ball.'''
        if not self.on_grid:
            raise ValueError(f'{self.ambient!r} has no lattice')
        grid = self.ambient
        values = grid.flat.copy()
        nodes = grid.active & self.inside(grid.points)
        values[nodes] = self.test.value(grid.points[nodes])
        return values
