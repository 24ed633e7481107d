"""A generic set of util functions used across the project.
"""
import logging
import logging.config
import os
from pathlib import Path
from typing import Dict, Optional

import yaml

# project root: core -> chow_calculus -> root
PROJECT_ROOT = Path(__file__).parent.parent.parent.resolve()

CONFIG_ENV_VAR = "CHOW_CALCULUS_CONFIG"

DEFAULT_ENGINE_SETTINGS = {
	"max_dimension": 20,
	"max_partition_dimension": 6,
	"long_run_dimension": 5,
	"max_basis_size": 5000,
	"max_oracle_dimension": 3,
	"max_rewrite_steps": 1000000,
	"cache_spot_checks": 3,
	"batch_size": 64,
}


class ChowCalculusError(Exception):
	"""Base class for every error raised by the library.
	"""
	pass


class ConsistencyError(ChowCalculusError):
	"""A computed result contradicts a mathematical invariant. Never expected.
	"""
	pass


def resolve_config_path(config_file: Optional[str] = None) -> Optional[Path]:
	"""Locate the config file.

	An explicit path wins, then the CHOW_CALCULUS_CONFIG environment variable, then
	the config.yml at the project root. The working directory is never searched.
	"""
	config_file = config_file or os.environ.get(CONFIG_ENV_VAR)
	path = Path(config_file) if config_file else PROJECT_ROOT / "config.yml"
	if path.exists():
		return path.resolve()
	return None


def read_config(config_file: Optional[str] = None) -> Dict:
	"""Read project configuraiton from a yaml file.

	Args:
			config_file (str, optional): Path to the config file. Defaults to the project config.yml.

	Returns:
			Dict: The parsed config in a python dict, empty if no config file was found.
	"""
	path = resolve_config_path(config_file)
	if path is None:
		return {}
	with open(path) as f:
		return yaml.load(f, yaml.Loader) or {}


_engine_settings: Dict[Optional[str], Dict] = {}


def engine_settings(config_file: Optional[str] = None) -> Dict:
	"""Engine limits from the "engine" section of the config, on top of the built-in defaults.

	Memoised per requested config file, so every path gets its own settings.
	"""
	source = config_file or os.environ.get(CONFIG_ENV_VAR)
	if source not in _engine_settings:
		settings = dict(DEFAULT_ENGINE_SETTINGS)
		settings.update(read_config(source).get("engine") or {})
		_engine_settings[source] = settings
	return _engine_settings[source]


def setting(name: str, override=None):
	if override is not None:
		return override
	return engine_settings()[name]


def setup_logging(config: Dict = None) -> logging.Logger:
	config = read_config() if config is None else config
	if config.get("logging"):
		logging.config.dictConfig(config["logging"])
	else:
		logging.basicConfig()
	return logging.getLogger("main")
