from .bounds import PVError
from .bounds import c2beta_norm
from .bounds import near_zone_bound
from .certificate import near_zone_certificate
from .certificate import near_zone_rate
from .continuity import continuity_check
from .engine import CONVERGED
from .engine import DIVERGED
from .engine import INCONCLUSIVE
from .engine import PVResult
from .engine import affine_annulus_integral
from .engine import pv_evaluate
from .engine import suite_affine_annulus
from .scan import threshold_scan


__all__ = [
    'CONVERGED',
    'DIVERGED',
    'INCONCLUSIVE',
    'PVError',
    'PVResult',
    'affine_annulus_integral',
    'c2beta_norm',
    'continuity_check',
    'near_zone_bound',
    'near_zone_certificate',
    'near_zone_rate',
    'pv_evaluate',
    'suite_affine_annulus',
    'threshold_scan',
]
