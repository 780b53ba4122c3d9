
import dataclasses
import json as _json_
import math

import numpy as np

from json import * # noqa
from pathlib import Path


def _finite(o):
    if isinstance(o, float) and not math.isfinite(o):
        return 'nan' if math.isnan(o) else ('inf' if o > 0 else '-inf')
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    return o


def dumps(obj, *args, **kwargs):
    kwargs.setdefault('cls', FracplapJSONEncoder)
    kwargs.setdefault('allow_nan', False)
    return _json_.dumps(_finite(FracplapJSONEncoder.plain(obj)), *args, **kwargs)


class FracplapJSONEncoder(_json_.JSONEncoder):
    @classmethod
    def plain(cls, o):
        '''Convert numpy values and dataclasses to plain python, recursively.'''
        if dataclasses.is_dataclass(o) and not isinstance(o, type):
            if hasattr(o, 'to_dict'):
                return cls.plain(o.to_dict())
            return cls.plain(dataclasses.asdict(o))
        if isinstance(o, dict):
            return {str(k): cls.plain(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [cls.plain(v) for v in o]
        if isinstance(o, np.ndarray):
            return cls.plain(o.tolist())
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        return o

    def default(self, o):
        if isinstance(o, bytes):
            return o.decode()
        if isinstance(o, Path):
            return str(o)
        plain = self.plain(o)
        if plain is not o:
            return plain
        return super().default(o)
