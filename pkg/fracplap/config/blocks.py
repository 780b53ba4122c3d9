
from abc import abstractmethod

from ..kernels import KernelError
from ..kernels import KernelSpec
from ..space.analytic import AnalyticFunction
from ..space.domain import DomainSpec
from ..space.domain import FunctionSpaceError
from ..space.farfield import FarField
from .definition import Definition
from .definition import DefinitionField


OPTIONAL = DefinitionField.OPTIONAL


class BuildingDefinition(Definition):
    '''A block that builds one library object.'''
    @abstractmethod
    def _build(self):
        pass

    def build(self):
        try:
            return self._build()
        except (KernelError, FunctionSpaceError, ValueError, TypeError) as e:
            self._raise(str(e))


class KernelDefinition(BuildingDefinition):
    SUBCLASSES = {}
    ABSTRACT_SUBCLASSES = {}
    DEFAULT_TYPE = 'power'

    @classmethod
    def _add_fields(cls):
        return {
            'dimension': int,
            's': float,
            'p': float,
            'lambda': float,
            'scale': float,
        }

    @classmethod
    def _field_defaults(cls):
        return {
            'dimension': 1,
            'lambda': 1.0,
            'scale': 1.0,
        }

    def _build(self):
        config = {k: v for k, v in self.items() if k != 'type'}
        config['profile'] = self.TYPE()
        return KernelSpec.from_config(config)


class PowerKernelDefinition(KernelDefinition):
    @classmethod
    def TYPE(cls):
        return 'power'


class PerturbedKernelDefinition(KernelDefinition):
    @classmethod
    def TYPE(cls):
        return 'perturbed'

    @classmethod
    def _add_fields(cls):
        return {
            'angular_coeffs': list,
        }

    @classmethod
    def _field_defaults(cls):
        return {
            'angular_coeffs': OPTIONAL,
        }


class DomainDefinition(BuildingDefinition):
    SUBCLASSES = {}
    ABSTRACT_SUBCLASSES = {}
    DEFAULT_TYPE = 'interval'

    def _build(self):
        return DomainSpec.from_config(self.data)


class IntervalDomainDefinition(DomainDefinition):
    @classmethod
    def TYPE(cls):
        return 'interval'

    @classmethod
    def _add_fields(cls):
        return {
            'lo': float,
            'hi': float,
        }

    def validate(self):
        if not self['lo'] < self['hi']:
            self._raise(f"empty interval: lo {self['lo']} >= hi {self['hi']}")


class BoxDomainDefinition(DomainDefinition):
    @classmethod
    def TYPE(cls):
        return 'box'

    @classmethod
    def _add_fields(cls):
        return {
            'lo': list,
            'hi': list,
        }


class BallDomainDefinition(DomainDefinition):
    @classmethod
    def TYPE(cls):
        return 'ball'

    @classmethod
    def _add_fields(cls):
        return {
            'center': list,
            'radius': float,
        }


class GridDefinition(Definition):
    @classmethod
    def TYPE(cls):
        return 'grid'

    @classmethod
    def _add_fields(cls):
        return {
            'h': float,
            'collar_width': float,
        }

    def validate(self):
        if not self['h'] > 0:
            self._raise(f"h must be positive: {self['h']}")
        if not self['collar_width'] > self['h']:
            self._raise(f"collar_width {self['collar_width']} must exceed h {self['h']}")


class ExteriorDefinition(BuildingDefinition):
    '''Far-field model of the exterior datum.'''
    SUBCLASSES = {}
    ABSTRACT_SUBCLASSES = {}
    DEFAULT_TYPE = 'zero'

    def _build(self):
        return FarField.from_config(self.data)


class ZeroExteriorDefinition(ExteriorDefinition):
    @classmethod
    def TYPE(cls):
        return 'zero'


class ConstantExteriorDefinition(ExteriorDefinition):
    @classmethod
    def TYPE(cls):
        return 'constant'

    @classmethod
    def _add_fields(cls):
        return {
            'value': float,
        }


class SignExteriorDefinition(ConstantExteriorDefinition):
    @classmethod
    def TYPE(cls):
        return 'sign'


class PowerExteriorDefinition(ExteriorDefinition):
    @classmethod
    def TYPE(cls):
        return 'power'

    @classmethod
    def _add_fields(cls):
        return {
            'amplitude': float,
            'gamma': float,
        }

    @classmethod
    def _field_defaults(cls):
        return {
            'amplitude': 1.0,
            'gamma': 0.0,
        }


class FunctionDefinition(BuildingDefinition):
    '''Closed-form function for the pointwise subcommands.'''
    SUBCLASSES = {}
    ABSTRACT_SUBCLASSES = {}


class CappedPowerFunctionDefinition(FunctionDefinition):
    @classmethod
    def TYPE(cls):
        return 'capped_power'

    @classmethod
    def _add_fields(cls):
        return {
            'beta': float,
            'cap': float,
            'dimension': int,
        }

    @classmethod
    def _field_defaults(cls):
        return {
            'cap': 1.0,
            'dimension': 1,
        }

    def _build(self):
        return AnalyticFunction.capped_power(self['beta'], self.value('cap'),
                                             self.value('dimension'))


class SingularExampleFunctionDefinition(FunctionDefinition):
    '''min(|x|^2, 1), the standard example of the singular regime.'''
    @classmethod
    def TYPE(cls):
        return 'singular_example'

    @classmethod
    def _add_fields(cls):
        return {
            'dimension': int,
        }

    @classmethod
    def _field_defaults(cls):
        return {
            'dimension': 1,
        }

    def _build(self):
        return AnalyticFunction.singular_example(self.value('dimension'))


class PowerOfNormFunctionDefinition(FunctionDefinition):
    @classmethod
    def TYPE(cls):
        return 'power_of_norm'

    @classmethod
    def _add_fields(cls):
        return {
            'beta': float,
            'center': list,
            'scale': float,
            'offset': float,
        }

    @classmethod
    def _field_defaults(cls):
        return {
            'center': [0.0],
            'scale': 1.0,
            'offset': 0.0,
        }

    def _build(self):
        return AnalyticFunction.power_of_norm(self['beta'], self.value('center'),
                                              scale=self.value('scale'),
                                              c=self.value('offset'))


class NegativeNormFunctionDefinition(FunctionDefinition):
    @classmethod
    def TYPE(cls):
        return 'negative_norm'

    @classmethod
    def _add_fields(cls):
        return {
            'dimension': int,
        }

    @classmethod
    def _field_defaults(cls):
        return {
            'dimension': 1,
        }

    def _build(self):
        return AnalyticFunction.negative_norm(self.value('dimension'))


class BumpFunctionDefinition(FunctionDefinition):
    @classmethod
    def TYPE(cls):
        return 'bump'

    @classmethod
    def _add_fields(cls):
        return {
            'center': list,
            'radius': float,
        }

    def _build(self):
        return AnalyticFunction.bump(self['center'], self['radius'])


class ToleranceDefinition(Definition):
    @classmethod
    def TYPE(cls):
        return 'tolerance'

    @classmethod
    def _add_fields(cls):
        return {
            'pv_tol': float,
            'solver_tol': float,
            'viscosity_tol': float,
            'compare_tol': float,
        }

    @classmethod
    def _field_defaults(cls):
        return {
            'pv_tol': 1e-8,
            'solver_tol': 1e-9,
            'viscosity_tol': 1e-6,
            'compare_tol': 1e-8,
        }

    def validate(self):
        for field in self.fields:
            if field != 'type' and not self.value(field) > 0:
                self._raise(f"'{field}' must be positive: {self.value(field)}")


class OutputDefinition(Definition):
    '''Where artifacts go: outdir/name/.'''
    @classmethod
    def TYPE(cls):
        return 'output'

    @classmethod
    def _add_fields(cls):
        return {
            'outdir': str,
            'name': str,
        }

    @classmethod
    def _field_defaults(cls):
        return {
            'outdir': OPTIONAL,
            'name': OPTIONAL,
        }
