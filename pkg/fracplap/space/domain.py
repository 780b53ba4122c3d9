
import numpy as np

from dataclasses import dataclass

from ..kernels import as_points


class FunctionSpaceError(ValueError):
    pass


class NotInTailSpaceError(FunctionSpaceError):
    pass


@dataclass(frozen=True)
class DomainSpec:
    '''Bounded open set: an interval (n=1), an axis-aligned box or a ball (n=2).'''
    n: int
    shape: str
    lo: tuple = None
    hi: tuple = None
    ball_center: tuple = None
    ball_radius: float = None

    def __post_init__(self):
        if self.shape in ('interval', 'box'):
            lo = np.asarray(self.lo, dtype=float)
            hi = np.asarray(self.hi, dtype=float)
            if lo.shape != (self.n,) or hi.shape != (self.n,):
                raise FunctionSpaceError(f'{self.shape} bounds must have {self.n} entries')
            if not np.all(lo < hi):
                raise FunctionSpaceError(f'{self.shape} has empty interior: {lo} {hi}')
        elif self.shape == 'ball':
            if np.shape(self.ball_center) != (self.n,):
                raise FunctionSpaceError(f'ball center must have {self.n} entries')
            if not (self.ball_radius and self.ball_radius > 0):
                raise FunctionSpaceError(f'ball radius must be positive: {self.ball_radius}')
        else:
            raise FunctionSpaceError(f"unknown domain shape '{self.shape}'")

    @classmethod
    def interval(cls, lo, hi):
        return cls(1, 'interval', lo=(float(lo),), hi=(float(hi),))

    @classmethod
    def box(cls, lo, hi):
        lo = tuple(float(v) for v in np.broadcast_to(lo, (2,)))
        hi = tuple(float(v) for v in np.broadcast_to(hi, (2,)))
        return cls(2, 'box', lo=lo, hi=hi)

    @classmethod
    def ball(cls, center, radius):
        center = tuple(float(v) for v in np.atleast_1d(center))
        return cls(len(center), 'ball', ball_center=center, ball_radius=float(radius))

    @classmethod
    def from_config(cls, config):
        shape = config.get('type') or config.get('shape')
        if shape == 'interval':
            return cls.interval(config['lo'], config['hi'])
        if shape == 'box':
            return cls.box(config['lo'], config['hi'])
        if shape == 'ball':
            return cls.ball(config['center'], config['radius'])
        raise FunctionSpaceError(f"unknown domain shape '{shape}'")

    def to_dict(self):
        if self.shape == 'ball':
            return {'type': 'ball', 'center': list(self.ball_center), 'radius': self.ball_radius}
        lo = self.lo[0] if self.n == 1 else list(self.lo)
        hi = self.hi[0] if self.n == 1 else list(self.hi)
        return {'type': self.shape, 'lo': lo, 'hi': hi}

    @property
    def center(self):
        if self.shape == 'ball':
            return np.asarray(self.ball_center, dtype=float)
        return (np.asarray(self.lo) + np.asarray(self.hi)) / 2

    @property
    def radius(self):
        '''Largest distance from the center to the closure.'''
        if self.shape == 'ball':
            return float(self.ball_radius)
        return float(np.linalg.norm(np.asarray(self.hi) - np.asarray(self.lo)) / 2)

    @property
    def diam(self):
        return 2 * self.radius

    @property
    def bounds(self):
        if self.shape == 'ball':
            c = self.center
            return c - self.ball_radius, c + self.ball_radius
        return np.asarray(self.lo, dtype=float), np.asarray(self.hi, dtype=float)

    def max_distance(self, point):
        '''Largest distance from point to the closure.'''
        c = np.asarray(point, dtype=float)
        if self.shape == 'ball':
            return float(np.linalg.norm(self.center - c) + self.ball_radius)
        lo, hi = self.bounds
        corner = np.where(np.abs(lo - c) > np.abs(hi - c), lo, hi)
        return float(np.linalg.norm(corner - c))

    def contains(self, x, closed=False):
        '''Membership of points in the open set (or its closure).'''
        points, scalar = as_points(x, self.n)
        if self.shape == 'ball':
            d = np.linalg.norm(points - self.center, axis=-1)
            inside = d <= self.ball_radius if closed else d < self.ball_radius
        else:
            lo, hi = self.bounds
            if closed:
                inside = np.all((points >= lo) & (points <= hi), axis=-1)
            else:
                inside = np.all((points > lo) & (points < hi), axis=-1)
        return bool(inside.reshape(-1)[0]) if scalar else inside

    def distance_to_boundary(self, x):
        points, scalar = as_points(x, self.n)
        if self.shape == 'ball':
            d = self.ball_radius - np.linalg.norm(points - self.center, axis=-1)
        else:
            lo, hi = self.bounds
            d = np.min(np.minimum(points - lo, hi - points), axis=-1)
        return float(d.reshape(-1)[0]) if scalar else d

    def subbox(self, lo, hi):
        if self.n == 1:
            sub = DomainSpec.interval(np.atleast_1d(lo)[0], np.atleast_1d(hi)[0])
        else:
            sub = DomainSpec.box(lo, hi)
        corners = np.array(np.meshgrid(*[[a, b] for a, b in zip(*sub.bounds)])).reshape(
            self.n, -1).T
        if not np.all(self.contains(corners, closed=True)):
            raise FunctionSpaceError(f'sub-box {sub.to_dict()} leaves {self.to_dict()}')
        return sub
