
import csv
import io
import logging

from pathlib import Path

import numpy as np

from .. import json
from ..artifacts import SCHEMA_VERSION
from ..artifacts import atomic_write
from .domain import FunctionSpaceError
from .grid import GridFunction


LOGGER = logging.getLogger(__name__)


def header_path(path):
    return Path(path).with_suffix('.json')


def grid_csv(u):
    '''CSV text with node coordinates and value; floats as repr, which round-trips.'''
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    coords = ['x'] if u.n == 1 else ['x', 'y']
    writer.writerow(coords + ['value'])
    for point, value in zip(u.points, u.flat):
        writer.writerow([repr(float(c)) for c in point] + [repr(float(value))])
    return buf.getvalue()


def grid_header(u):
    header = dict(u.header())
    header['schema_version'] = SCHEMA_VERSION
    return json.dumps(header, indent=2, sort_keys=True) + '\n'


def write_grid(path, u):
    path = Path(path)
    atomic_write(path, grid_csv(u))
    atomic_write(header_path(path), grid_header(u))
    LOGGER.debug(f'Wrote grid function to {path}')


def read_grid(path):
    path = Path(path)
    try:
        header = json.loads(header_path(path).read_text(encoding='utf-8'))
    except FileNotFoundError:
        raise FunctionSpaceError(f'missing grid header {header_path(path)}')
    with path.open(encoding='utf-8', newline='') as f:
        rows = list(csv.reader(f))
    values = np.array([float(row[-1]) for row in rows[1:]])
    u = GridFunction.from_header(header, values)
    coords = np.array([[float(c) for c in row[:-1]] for row in rows[1:]])
    if coords.shape != u.points.shape or not np.array_equal(coords, u.points):
        raise FunctionSpaceError(f'{path}: node coordinates do not match the header lattice')
    return u
