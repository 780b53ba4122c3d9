from .checker import TouchingReport
from .checker import check_touching
from .checker import check_truncation
from .checker import check_viscosity_at
from .checker import corrupt
from .checker import min_with_constant
from .checker import scan_equivalence
from .checker import touching_principal_value
from .checker import truncate_min
from .glued import GluedFunction
from .testfunctions import InadmissibleTestFunctionError
from .testfunctions import TestFunction
from .testfunctions import TouchingError
from .testfunctions import ViscosityError
from .testfunctions import c2beta_norm
from .testfunctions import test_family


__all__ = [
    'GluedFunction',
    'InadmissibleTestFunctionError',
    'TestFunction',
    'TouchingError',
    'TouchingReport',
    'ViscosityError',
    'c2beta_norm',
    'check_touching',
    'check_truncation',
    'check_viscosity_at',
    'corrupt',
    'min_with_constant',
    'scan_equivalence',
    'test_family',
    'touching_principal_value',
    'truncate_min',
]
