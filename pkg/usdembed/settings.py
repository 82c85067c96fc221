"""
usdembed settings
=================

This module allows users to configure the numerical tolerances and defaults
used throughout ``usdembed``.

Settings are resolved in three layers: ``DEFAULT_SETTINGS``, the user file
``~/.usdembed/settings.json`` and finally the ``USD_EMBED_TOL`` environment
variable, which holds a JSON object of overrides.
"""
from pathlib import Path
import os
import warnings
import json

from .exceptions import SettingsError

ENV_VAR = 'USD_EMBED_TOL'

USER_DATA_PATH = Path.home() / '.usdembed'
USER_SETTINGS_PATH = USER_DATA_PATH / 'settings.json'

DEFAULT_SETTINGS = {
    'tol_recon': 1e-12,
    'tol_herm': 1e-12,
    'tol_unitary': 1e-10,
    'tol_eig': 1e-12,
    'clamp_window': 1e-10,
    'tol_norm': 1e-12,
    'lin_indep_tol': 1e-10,
    'tol_passivity': 1e-10,
    'tol_povm': 1e-10,
    'tol_orth': 1e-10,
    'tol_prob': 1e-10,
    'theta_reduce_tol': 1e-9,
    'bound_slack': 1e-9,
    'rwa_convergence': 1e-6,
    'rwa_initial_steps': 1024,
    'rwa_max_steps': 2**21,
    'transition_separation': 1e-6,
    'default_trials': 100_000,
    'default_seed': 0x05D1,
    'block_size': 4096,
    'schema_version': '1.0',
}


settings_need_reload = False
def save_settings(**kwargs):
    """
    Persist settings to the user settings file and reload them.

    Raises
    ------
    KeyError
        If a key is not a known setting.
    """
    if not USER_DATA_PATH.exists():
        USER_DATA_PATH.mkdir(parents=True)
    if not USER_SETTINGS_PATH.exists():
        USER_SETTINGS_PATH.touch()
    with USER_SETTINGS_PATH.open('r') as file:
        try:
            previous_settings = json.load(file)
        except json.decoder.JSONDecodeError:
            previous_settings = {}

    for key, value in kwargs.items():
        if key in DEFAULT_SETTINGS:
            previous_settings[key] = value
        else:
            raise KeyError(f'Unknown setting {key}.')
    with USER_SETTINGS_PATH.open('w') as file:
        json.dump(previous_settings, file, indent=4)
    # pylint: disable-next=global-statement
    global settings_need_reload
    settings_need_reload = True
    reload_settings()


def _env_overrides() -> dict:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == '':
        return {}
    try:
        overrides = json.loads(raw)
    except json.decoder.JSONDecodeError as err:
        raise SettingsError(f'{ENV_VAR} must hold a JSON object: {err}') from err
    if not isinstance(overrides, dict):
        raise SettingsError(f'{ENV_VAR} must hold a JSON object, got {type(overrides).__name__}.')
    for key in overrides:
        if key not in DEFAULT_SETTINGS:
            raise SettingsError(f'Unknown setting {key} in {ENV_VAR}.')
    return overrides


def load_settings() -> dict:
    """
    Read the defaults, the user file and the environment overrides.

    Returns
    -------
    dict
        The resolved settings.
    """
    try:
        with USER_SETTINGS_PATH.open('r') as file:
            try:
                settings = json.load(file)
            except json.decoder.JSONDecodeError:
                settings = {}
    except FileNotFoundError:
        settings = {}
    for key, value in DEFAULT_SETTINGS.items():
        if key not in settings:
            settings[key] = value
    settings.update(_env_overrides())
    # pylint: disable-next=global-statement
    global settings_need_reload
    settings_need_reload = False
    return settings

user_settings = load_settings()

def reload_settings():
    # pylint: disable-next=global-statement
    global user_settings
    user_settings = load_settings()

class StaleSettingsWarning(RuntimeWarning):
    pass

def get_setting(key):
    if settings_need_reload:
        msg = 'Your user settings have changed recently.\n'
        msg += 'Please reload the settings using the `usdembed.settings.reload_settings()` function.'
        warnings.warn(msg, StaleSettingsWarning)
    if key in user_settings:
        return user_settings[key]
    else:
        raise KeyError(f'Unknown setting {key}.')
