from .config import RunConfig
from .experiments import Experiments
from .kernels import KernelSpec
from .space import AnalyticFunction
from .space import DomainSpec
from .space import GridFunction


__all__ = [
    'AnalyticFunction',
    'DomainSpec',
    'Experiments',
    'GridFunction',
    'KernelSpec',
    'RunConfig',
]
