from .definition import InvalidConfigError
from .run import REQUIRED_BLOCKS
from .run import SUBCOMMAND_PARAMS
from .run import RunConfig


__all__ = [
    'InvalidConfigError',
    'REQUIRED_BLOCKS',
    'RunConfig',
    'SUBCOMMAND_PARAMS',
]
