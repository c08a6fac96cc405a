import pytest

from casp_forge.errors import ConfigurationError
from casp_forge.settings import DEFAULT_BUDGET_S, Settings, load_settings


def test_defaults():
    assert load_settings({}) == Settings(seed=0, budget_s=DEFAULT_BUDGET_S, log_level="WARNING", workers=1)


def test_reads_environment():
    settings = load_settings(
        {"CASP_FORGE_SEED": "42", "CASP_FORGE_BUDGET_S": "600", "CASP_FORGE_LOG_LEVEL": "debug", "CASP_FORGE_WORKERS": "4"}
    )
    assert settings == Settings(seed=42, budget_s=600.0, log_level="DEBUG", workers=4)


def test_blank_values_fall_back():
    assert load_settings({"CASP_FORGE_SEED": "  "}).seed == 0


@pytest.mark.parametrize(
    "name, raw",
    [
        ("CASP_FORGE_SEED", "abc"),
        ("CASP_FORGE_BUDGET_S", "-1"),
        ("CASP_FORGE_LOG_LEVEL", "loud"),
        ("CASP_FORGE_WORKERS", "0"),
    ],
)
def test_rejects_bad_values(name, raw):
    with pytest.raises(ConfigurationError) as err:
        load_settings({name: raw})
    assert name in str(err.value)


def test_os_environ_is_the_default(monkeypatch):
    monkeypatch.setenv("CASP_FORGE_SEED", "9")
    assert load_settings().seed == 9
