import os
import logging
from functools import lru_cache

import yaml

from dg_errors import WindowOverflowError


class EngineConfig:
    _config_filename = "engine_config.yaml"
    default_path = None

    def extract_config(self, path=None):
        if path is None:
            path = os.path.join(os.path.dirname(__file__), self._config_filename)
        with open(path, 'r') as file:
            yaml_dict = yaml.load(file, Loader=yaml.FullLoader)
            config = yaml_dict['dg_engine']
            lo, hi = config['degree_bound']
            if lo > hi:
                raise ValueError(f'"degree_bound" is empty ({lo} > {hi}). Check the configuration file at {path}')
            self.degree_bound = (int(lo), int(hi))
            self.naturality_panel = int(config['naturality_panel'])
            if self.naturality_panel < 1:
                raise ValueError(f'"naturality_panel" must be positive. Check the configuration file at {path}')
            self.default_seed = int(config['default_seed'])
            self.random_coefficients = tuple(int(c) for c in config['random_coefficients'])
            self.max_depth = int(config['semifree']['max_depth'])
            self.shifts = tuple(int(k) for k in config['semifree']['shifts'])
            self.default_field = str(config['fields']['default'])
            level = config['logging']['level']
            if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR'):
                raise ValueError(f'"logging.level" is {level}, not a logging level. Check the configuration file at {path}')
            self.log_level = getattr(logging, level)
            self.log_format = config['logging']['format']

    def __init__(self, path=None):
        self.path = path
        self.extract_config(path)

    def check_window(self, lo, hi, what='object'):
        bound_lo, bound_hi = self.degree_bound
        if lo < bound_lo or hi > bound_hi:
            raise WindowOverflowError(
                f'{what} needs degrees [{lo}, {hi}], outside the bound [{bound_lo}, {bound_hi}]')


@lru_cache(maxsize=None)
def _load(path):
    return EngineConfig(path)


def engine_config(path=None):
    return _load(path or EngineConfig.default_path)


def use_config(path):
    """Make the file at path the configuration every later engine_config() call reads."""
    EngineConfig(path)
    EngineConfig.default_path = path
