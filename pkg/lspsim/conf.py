"""
Lazy access to the active settings module.

The module is chosen by LSPSIM_SETTINGS_MODULE (default
``lspsim.settings.dev``) and imported on first attribute access.
"""

import importlib
import logging.config
import os

SETTINGS_MODULE_ENV = "LSPSIM_SETTINGS_MODULE"
DEFAULT_SETTINGS_MODULE = "lspsim.settings.dev"


class LazySettings:
    def __init__(self):
        self._wrapped = None

    def _setup(self):
        module_name = os.environ.get(SETTINGS_MODULE_ENV, DEFAULT_SETTINGS_MODULE)
        self._wrapped = importlib.import_module(module_name)

    def __getattr__(self, name):
        if self._wrapped is None:
            self._setup()
        try:
            return getattr(self._wrapped, name)
        except AttributeError:
            raise AttributeError(
                f"Setting {name!r} is not defined in {self._wrapped.__name__}"
            ) from None

    @property
    def module_name(self):
        if self._wrapped is None:
            self._setup()
        return self._wrapped.__name__

    def reset(self):
        """Forget the loaded module so the next access re-reads the environment."""
        self._wrapped = None


settings = LazySettings()


def configure_logging():
    logging.config.dictConfig(settings.LOGGING)
