
import logging
import yaml

from copy import deepcopy
from functools import cached_property
from pathlib import Path

from .. import json
from ..pv.scan import P_GRID
from ..pv.scan import S_GRID
from ..space.domain import FunctionSpaceError
from ..weak.solver import DirichletProblem
from .blocks import DomainDefinition
from .blocks import ExteriorDefinition
from .blocks import FunctionDefinition
from .blocks import GridDefinition
from .blocks import KernelDefinition
from .blocks import OutputDefinition
from .blocks import ToleranceDefinition
from .definition import Definition
from .definition import DefinitionField
from .definition import InvalidConfigError


LOGGER = logging.getLogger(__name__)

OPTIONAL = DefinitionField.OPTIONAL

LATTICE_BLOCKS = ('kernel', 'domain', 'grid', 'exterior')

REQUIRED_BLOCKS = {
    'check-kernel': ('kernel',),
    'lemma-suite': (),
    'pv-eval': ('kernel', 'function'),
    'threshold-scan': (),
    'solve': LATTICE_BLOCKS,
    'residual': LATTICE_BLOCKS,
    'viscosity-check': LATTICE_BLOCKS,
    'scan-equivalence': LATTICE_BLOCKS,
    'compare': LATTICE_BLOCKS,
    'doubling-diagnostic': LATTICE_BLOCKS,
}

# params accepted by each subcommand, with their defaults
SUBCOMMAND_PARAMS = {
    'check-kernel': {
        'decades': 6,
        'n_radii': 61,
        'n_angles': 64,
        'n_random': 1000,
    },
    'lemma-suite': {
        'samples': 100000,
        'oracle_samples': 10000,
        'affine_samples': 100,
    },
    'pv-eval': {
        'points': [[0.0]],
        'radius': 0.5,
        'expect': None,
        'expected_rate': None,
        'rate_tol': 0.1,
        'near_zone_beta': None,
        'near_zone_tol': 0.15,
        'continuity_radius': None,
    },
    'threshold-scan': {
        's_grid': list(S_GRID),
        'p_grid': list(P_GRID),
        'dimension': 1,
    },
    'solve': {
        'method': 'newton',
        'interior': 0.0,
        'refine': [],
        'oracle_tol': 1e-8,
    },
    'residual': {
        'method': 'newton',
        'pairing_tol': 1e-6,
    },
    'viscosity-check': {
        'method': 'newton',
        'points': None,
        'count': 10,
        'margin': 0.0,
    },
    'scan-equivalence': {
        'method': 'newton',
        'side': 'both',
        'cones': True,
        'quadratics': True,
        'margin': 0.0,
        'corrupt': True,
        'corrupt_amplitude': None,
    },
    'compare': {
        'method': 'newton',
        'trials': 20,
        'amplitude': 0.5,
        'doubling': True,
    },
    'doubling-diagnostic': {
        'method': 'newton',
        'q': None,
        'eps_sequence': None,
        'shift': 0.1,
        'violation': 0.0,
    },
}


class RunDefinition(Definition):
    '''The top level of an experiment config.'''
    @classmethod
    def TYPE(cls):
        return 'run'

    @classmethod
    def _add_fields(cls):
        fields = {block: dict for block in ('kernel', 'domain', 'grid', 'exterior',
                                            'function', 'tolerance', 'output')}
        fields.update({
            'subcommand': str,
            'seed': int,
            'params': dict,
        })
        return fields

    @classmethod
    def _field_defaults(cls):
        defaults = {block: OPTIONAL for block in ('kernel', 'domain', 'grid', 'exterior',
                                                  'function', 'tolerance', 'output')}
        defaults.update({
            'seed': 42,
            'params': OPTIONAL,
        })
        return defaults

    def validate(self):
        subcommand = self['subcommand']
        if subcommand not in REQUIRED_BLOCKS:
            self._raise(f"unknown subcommand '{subcommand}' "
                        f"(expected one of {', '.join(sorted(REQUIRED_BLOCKS))})")
        missing = [b for b in REQUIRED_BLOCKS[subcommand] if b not in self]
        if missing:
            self._raise(f"subcommand '{subcommand}' needs blocks: '{','.join(missing)}'")
        unknown = set(self.get('params') or {}) - set(SUBCOMMAND_PARAMS[subcommand])
        if unknown:
            self._raise(f"subcommand '{subcommand}' has no params "
                        f"'{','.join(sorted(unknown))}'")


def _typed_block(name, block, alias):
    '''Accept {alias, parameters} as a spelling of {type, ...}.'''
    block = dict(block)
    if alias in block:
        if 'type' in block:
            raise InvalidConfigError(f"{name}: conflicting fields: '{alias}' and 'type'")
        block['type'] = block.pop(alias)
    parameters = block.pop('parameters', None) or {}
    if not isinstance(parameters, dict):
        raise InvalidConfigError(f'{name}: parameters must be a mapping: {parameters!r}')
    for key, value in parameters.items():
        if key in block:
            raise InvalidConfigError(f"{name}: '{key}' given twice")
        block[key] = value
    return block


class RunConfig(object):
    '''A validated experiment config with its blocks built into library objects.'''
    def __init__(self, definition, *, subcommand=None, source=None):
        if not isinstance(definition, dict):
            raise InvalidConfigError(f'{source or "config"}: expected a mapping at the top level')
        definition = deepcopy(definition)
        if subcommand:
            given = definition.setdefault('subcommand', subcommand)
            if given != subcommand:
                raise InvalidConfigError(f"config is for subcommand '{given}', "
                                         f"not '{subcommand}'")
        for name, alias in (('exterior', 'kind'), ('kernel', 'profile')):
            if isinstance(definition.get(name), dict):
                definition[name] = _typed_block(name, definition[name], alias)
        self.source = source
        self.definition = RunDefinition(definition, block=source or 'run')
        self._blocks()

    @classmethod
    def load(cls, path, subcommand=None):
        path = Path(path)
        try:
            text = path.read_text(encoding='utf-8')
        except OSError as e:
            raise InvalidConfigError(f'{path}: {e.strerror}')
        if path.suffix.lower() == '.json':
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise InvalidConfigError(f'{path}:{e.lineno}:{e.colno}: {e.msg}')
        else:
            try:
                data = yaml.safe_load(text)
            except yaml.MarkedYAMLError as e:
                mark = e.problem_mark
                if mark is None:
                    raise InvalidConfigError(f'{path}: {e}')
                raise InvalidConfigError(f'{path}:{mark.line + 1}:{mark.column + 1}: '
                                         f'{e.problem}')
            except yaml.YAMLError as e:
                raise InvalidConfigError(f'{path}: {e}')
        LOGGER.debug(f'Loaded config {path}')
        return cls(data, subcommand=subcommand, source=str(path))

    def _block(self, name, definitionclass):
        block = self.definition.get(name)
        if block is None:
            if name in ('tolerance', 'output'):
                block = {}
            else:
                return None
        return definitionclass(block, block=name)

    def _blocks(self):
        self.kernel_block = self._block('kernel', KernelDefinition)
        self.domain_block = self._block('domain', DomainDefinition)
        self.grid = self._block('grid', GridDefinition)
        self.exterior_block = self._block('exterior', ExteriorDefinition)
        self.function_block = self._block('function', FunctionDefinition)
        self.tolerance = self._block('tolerance', ToleranceDefinition)
        self.output = self._block('output', OutputDefinition)
        # build now so a bad block fails at load time
        self.kernel, self.domain, self.far_field, self.function
        if (self.kernel is not None and self.function is not None and
                self.function.n != self.kernel.n):
            raise InvalidConfigError(f'function: dimension {self.function.n} does not match '
                                     f'kernel dimension {self.kernel.n}')
        if (self.kernel is not None and self.domain is not None and
                self.domain.n != self.kernel.n):
            raise InvalidConfigError(f'domain: dimension {self.domain.n} does not match '
                                     f'kernel dimension {self.kernel.n}')

    @property
    def subcommand(self):
        return self.definition['subcommand']

    @property
    def seed(self):
        return self.definition.value('seed')

    @cached_property
    def params(self):
        defaults = SUBCOMMAND_PARAMS[self.subcommand]
        params = dict(defaults)
        for key, value in (self.definition.get('params') or {}).items():
            # YAML reads 1e-8 as a string
            if isinstance(defaults[key], float) and isinstance(value, str):
                try:
                    value = float(value)
                except ValueError:
                    raise InvalidConfigError(f"params: '{key}' must be a number: '{value}'")
            params[key] = value
        return params

    @cached_property
    def kernel(self):
        return self.kernel_block.build() if self.kernel_block is not None else None

    @cached_property
    def domain(self):
        return self.domain_block.build() if self.domain_block is not None else None

    @cached_property
    def far_field(self):
        return self.exterior_block.build() if self.exterior_block is not None else None

    @cached_property
    def function(self):
        return self.function_block.build() if self.function_block is not None else None

    def problem(self, far_field=None, h=None, **kwargs):
        '''The Dirichlet problem of the lattice blocks; far_field and h override the config.'''
        missing = [b for b in LATTICE_BLOCKS if self.definition.get(b) is None]
        if missing:
            raise InvalidConfigError(f"a Dirichlet problem needs blocks: '{','.join(missing)}'")
        kwargs.setdefault('solver_tol', self.tolerance.value('solver_tol'))
        try:
            return DirichletProblem.from_exterior(self.kernel, self.domain, h or self.grid['h'],
                                                  self.grid['collar_width'],
                                                  far_field or self.far_field, **kwargs)
        except FunctionSpaceError as e:
            raise InvalidConfigError(f'problem: {e}')

    def to_dict(self):
        data = {k: v for k, v in self.definition.items() if k != 'type'}
        data['params'] = self.params
        data['tolerance'] = {k: self.tolerance.value(k) for k in self.tolerance.fields
                             if k != 'type'}
        return data
