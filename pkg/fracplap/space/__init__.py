from .analytic import AnalyticFunction
from .domain import DomainSpec
from .domain import FunctionSpaceError
from .domain import NotInTailSpaceError
from .farfield import ConstantFarField
from .farfield import FarField
from .farfield import MinFarField
from .farfield import OffsetFarField
from .farfield import PowerFarField
from .farfield import SignFarField
from .farfield import ZeroFarField
from .farfield import far_min
from .grid import GridFunction
from .io import read_grid
from .io import write_grid
from .seminorm import check_tailspace_membership
from .seminorm import gagliardo_seminorm
from .seminorm import tail


__all__ = [
    'AnalyticFunction',
    'ConstantFarField',
    'DomainSpec',
    'FarField',
    'FunctionSpaceError',
    'GridFunction',
    'MinFarField',
    'NotInTailSpaceError',
    'OffsetFarField',
    'PowerFarField',
    'SignFarField',
    'ZeroFarField',
    'check_tailspace_membership',
    'far_min',
    'gagliardo_seminorm',
    'read_grid',
    'tail',
    'write_grid',
]
