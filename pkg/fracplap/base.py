#!/usr/bin/python3

import io
import logging
import os

from abc import ABC
from collections import ChainMap
from configparser import ConfigParser
from functools import cached_property
from pathlib import Path


LOGGER = logging.getLogger(__name__)


class FracplapBase(ABC):
    '''Runtime settings: how a run executes, never what it computes.

    A setting is looked up in the constructor kwargs, then FRACPLAP_* environment
    variables, then the ini section named after the lowercased class, and finally
    defaultconfig. Experiment parameters live in the RunConfig instead.
    '''
    ENVIRON_PREFIX = 'FRACPLAP_'

    @classmethod
    def CONFIG_SECTION(cls):
        return cls.__name__.lower()

    def __init__(self, **kwargs):
        super().__init__()
        self.kwargs = {k: v for k, v in kwargs.items() if v is not None}

    @property
    def configfiles(self):
        xdg_config_home = os.getenv('XDG_CONFIG_HOME', '~/.config')
        files = [Path(xdg_config_home).expanduser().resolve() / 'fracplap' / 'fracplap.conf']
        customcfg = self.kwargs.get('configfile')
        if customcfg:
            files.append(Path(customcfg).expanduser().resolve())
        return files

    @cached_property
    def configparser(self):
        configparser = ConfigParser()
        read = configparser.read(self.configfiles)
        if read:
            LOGGER.debug(f"Runtime config from {', '.join(read)}")
        if not configparser.has_section(self.CONFIG_SECTION()):
            configparser.add_section(self.CONFIG_SECTION())
        return configparser

    @property
    def environconfig(self):
        plen = len(self.ENVIRON_PREFIX)
        return {k[plen:].lower(): v for k, v in os.environ.items()
                if k.startswith(self.ENVIRON_PREFIX) and len(k) > plen}

    @property
    def defaultconfig(self):
        return {}

    @cached_property
    def config(self):
        return ChainMap(self.kwargs,
                        self.environconfig,
                        self.configparser[self.CONFIG_SECTION()],
                        self.defaultconfig)

    def config_bool(self, key):
        value = self.config.get(key, False)
        if isinstance(value, str):
            return value.strip().lower() in ('true', 'yes', '1')
        return bool(value)

    @property
    def dry_run(self):
        return self.config_bool('dry_run')

    def dumpconfig(self):
        '''The resolved settings as an ini section, ready to paste into fracplap.conf.'''
        dump = ConfigParser()
        dump[self.CONFIG_SECTION()] = {k: str(self.config.get(k))
                                       for k in sorted(self.config.keys())
                                       if k != 'configfile'}
        buf = io.StringIO()
        dump.write(buf)
        return buf.getvalue()
