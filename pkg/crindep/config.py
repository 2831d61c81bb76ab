"""Default settings for crindep."""

import os
from typing import Dict, Any, Literal, Tuple

from .errors import ConfigError

# Significance levels reported by default
DEFAULT_ALPHAS: Tuple[float, ...] = (0.05, 0.01)

# Bootstrap settings
TEST_BOOTSTRAP_B = 1000  # data analysis
MIN_BOOTSTRAP_B = 100

# Power-study settings
DESK_REPS = 500
DESK_BOOTSTRAP_B = 2000
FULL_REPS = 1000
FULL_BOOTSTRAP_B = 10000
DEFAULT_PI1 = 0.5  # k = 2

# Numerical tolerances
TAIL_MASS = 1e-10  # residual mass allowed when truncating parametric laws
TRUNCATION_WARN_TAIL = 1e-8
PSD_TOLERANCE = 1e-8  # relative to the trace
DENSITY_TOLERANCE = 1e-12
MAX_SUPPORT = 10_000_000

# Seeds
DEFAULT_SEED = 20240531
SEED_ENV_VAR = "CRINDEP_SEED"
_MAX_SEED = 2**64 - 1

ScalePreset = Literal["desk", "full"]


def get_desk_preset(**kwargs) -> Dict[str, Any]:
    """Get desk-scale power-study settings.

    Monte Carlo error at these settings is already small compared with the
    spread between neighbouring cells of a power table.

    Parameters
    ----------
    **kwargs
        Settings to override

    Returns
    -------
    Dict[str, Any]
        Dictionary with ``reps`` and ``B``
    """
    params = {
        "reps": DESK_REPS,
        "B": DESK_BOOTSTRAP_B,
    }
    params.update(kwargs)
    return params


def get_full_preset(**kwargs) -> Dict[str, Any]:
    """Get full-scale power-study settings (1000 replications, B=10000).

    Parameters
    ----------
    **kwargs
        Settings to override

    Returns
    -------
    Dict[str, Any]
        Dictionary with ``reps`` and ``B``
    """
    params = {
        "reps": FULL_REPS,
        "B": FULL_BOOTSTRAP_B,
    }
    params.update(kwargs)
    return params


def get_scale_preset(preset: ScalePreset = "desk", **kwargs) -> Dict[str, Any]:
    """Get power-study settings by preset name.

    Parameters
    ----------
    preset : {'desk', 'full'}
        Preset name
    **kwargs
        Settings to override

    Returns
    -------
    Dict[str, Any]
        Dictionary with ``reps`` and ``B``

    Raises
    ------
    ValueError
        If the preset name is unknown
    """
    preset_functions = {
        "desk": get_desk_preset,
        "full": get_full_preset,
    }

    if preset not in preset_functions:
        raise ValueError(
            f"Unknown preset '{preset}'. "
            f"Available presets: {list(preset_functions.keys())}"
        )

    return preset_functions[preset](**kwargs)


def parse_seed(value: Any) -> int:
    """Validate a master seed (non-negative 64-bit integer).

    Raises
    ------
    ConfigError
        If the value is not an integer in [0, 2**64 - 1]
    """
    try:
        seed = int(str(value).strip())
    except ValueError:
        raise ConfigError(f"seed must be an integer, got {value!r}") from None
    if seed < 0 or seed > _MAX_SEED:
        raise ConfigError(f"seed must lie in [0, 2**64 - 1], got {seed}")
    return seed


def default_seed() -> int:
    """Master seed from ``CRINDEP_SEED`` if set, else ``DEFAULT_SEED``."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    return parse_seed(raw)
