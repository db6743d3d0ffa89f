"""Degenerate elliptic and parabolic operators on the half-space."""

import json as _json

from ._core import (
    ConfigError,
    ParameterError,
    __version__,
    beta_map,
    compose_beta,
    inverse_beta,
    suite_checks,
    suite_names,
)
from . import _core


def _text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def validate_window(config=None):
    """Window test for a run config given as a dict or JSON string."""
    return _core.validate_window(_text(config))


def reduce(config=None):
    """Model parameters and the transform chain of a run config."""
    model, chain = _core.reduce(_text(config))
    return model, _json.loads(chain)


def run_check(check_id, config=None):
    """Runs one registered check and returns its result as a dict."""
    return _core.run_check(check_id, _text(config))


def solve_elliptic(config=None):
    """Manufactured elliptic solve; returns residual and relative error."""
    return _core.solve_elliptic(_text(config))


__all__ = [
    "ConfigError",
    "ParameterError",
    "__version__",
    "beta_map",
    "compose_beta",
    "inverse_beta",
    "reduce",
    "run_check",
    "solve_elliptic",
    "suite_checks",
    "suite_names",
    "validate_window",
]
