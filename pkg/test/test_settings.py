"""
Tests for the settings layers
"""
import json
import pytest

from usdembed import settings
from usdembed.exceptions import SettingsError


@pytest.fixture(autouse=True)
def restore_settings():
    """
    Reload the real settings once monkeypatching is undone.
    """
    yield
    settings.reload_settings()


@pytest.fixture
def user_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, 'USER_DATA_PATH', tmp_path / '.usdembed')
    monkeypatch.setattr(settings, 'USER_SETTINGS_PATH', tmp_path / '.usdembed' / 'settings.json')
    monkeypatch.delenv(settings.ENV_VAR, raising=False)
    settings.reload_settings()
    return tmp_path / '.usdembed'


def test_defaults(user_dir):
    for key, value in settings.DEFAULT_SETTINGS.items():
        assert settings.get_setting(key) == value
    with pytest.raises(KeyError):
        settings.get_setting('no_such_setting')


def test_env_override(user_dir, monkeypatch):
    monkeypatch.setenv(settings.ENV_VAR, json.dumps({'tol_orth': 1e-8, 'default_trials': 10}))
    settings.reload_settings()
    assert settings.get_setting('tol_orth') == 1e-8
    assert settings.get_setting('default_trials') == 10
    assert settings.get_setting('tol_povm') == settings.DEFAULT_SETTINGS['tol_povm']


@pytest.mark.parametrize('value', ['{not json', '[1, 2]', '{"tol_unknown": 1}'])
def test_bad_env_override(user_dir, monkeypatch, value):
    monkeypatch.setenv(settings.ENV_VAR, value)
    with pytest.raises(SettingsError):
        settings.reload_settings()


def test_save_settings(user_dir, monkeypatch):
    settings.save_settings(block_size=128)
    assert json.loads((user_dir / 'settings.json').read_text()) == {'block_size': 128}
    assert settings.get_setting('block_size') == 128
    monkeypatch.setenv(settings.ENV_VAR, '{"block_size": 64}')
    settings.reload_settings()
    assert settings.get_setting('block_size') == 64
    with pytest.raises(KeyError):
        settings.save_settings(no_such_setting=1)


def test_corrupt_user_file(user_dir):
    user_dir.mkdir()
    (user_dir / 'settings.json').write_text('{oops')
    settings.reload_settings()
    assert settings.get_setting('tol_orth') == settings.DEFAULT_SETTINGS['tol_orth']


if __name__ == '__main__':
    pytest.main(args=[__file__])
