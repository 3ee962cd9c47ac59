"""Configuration loading: happy path, invariant enforcement with key-path
diagnostics, unknown-key rejection, and environment resolution."""

from __future__ import annotations

import re

import pytest

from fluxseek import ConfigError, default_rulebase
from fluxseek.harness import default_config_text, load_config, parse_config
from fluxseek.harness.config import ENV_CONFIG_VAR


@pytest.fixture()
def default_text() -> str:
    return default_config_text()


def test_packaged_default_loads(config):
    assert config.machine.rated_torque == 24.0
    assert config.machine.rotor_time_constant == pytest.approx(0.15)
    assert len(config.rulebase.rules) == 14
    assert config.search.steady_speed_tolerance == pytest.approx(
        0.005 * config.machine.rated_speed
    )
    assert {s.name for s in config.scenarios} >= {
        "quarter-load-search",
        "rated-flux-baseline",
        "short-demo",
    }


def test_packaged_partition_equals_code_default(config):
    # The YAML thirds are written with enough digits to parse to the exact
    # doubles the in-code constructor derives.
    assert config.rulebase == default_rulebase()


def test_explicit_path_and_env_resolution(tmp_path, monkeypatch, default_text):
    good = tmp_path / "drive.yaml"
    good.write_text(default_text.replace("rated_torque: 24.0", "rated_torque: 20.0"))
    monkeypatch.setenv(ENV_CONFIG_VAR, str(good))
    via_env = load_config()
    assert via_env.machine.rated_torque == 20.0
    # explicit flag wins over the environment
    other = tmp_path / "other.yaml"
    other.write_text(default_text)
    assert load_config(str(other)).machine.rated_torque == 24.0


def test_missing_file_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(str(tmp_path / "absent.yaml"))


def test_invalid_yaml_is_config_error():
    with pytest.raises(ConfigError, match="not valid YAML"):
        parse_config("machine: [unclosed")


def test_min_excitation_invariant_names_the_key(default_text):
    broken = default_text.replace(
        "min_excitation_current: 0.5", "min_excitation_current: 6.0"
    )
    with pytest.raises(ConfigError, match="machine.*min_excitation_current"):
        parse_config(broken)


def test_missing_rule_is_totality_error(default_text):
    broken = default_text.replace(
        "    - {power: PB, last: P, output: NM}\n", ""
    )
    with pytest.raises(ConfigError, match="not total"):
        parse_config(broken)


def test_duplicate_rule_rejected(default_text):
    broken = default_text.replace(
        "    - {power: PB, last: P, output: NM}",
        "    - {power: PB, last: N, output: NM}",
    )
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(broken)


@pytest.mark.parametrize(
    "needle,replacement,key_pattern",
    [
        ("  stator_resistance: 0.7", "  stator_resistance: 0.7\n  bogus_key: 1.0", r"machine.*bogus_key"),
        ("  speed_kp: 2.0", "  speed_kp: 2.0\n  extra: 3", r"control.*extra"),
        ("    a: 0.4", "    a: 0.4\n    c9: 1.0", r"fuzzy\.scaling.*c9"),
        ("  decimation: 10", "  decimation: 10\n  color: blue", r"telemetry.*color"),
    ],
)
def test_unknown_keys_rejected_with_path(default_text, needle, replacement, key_pattern):
    broken = default_text.replace(needle, replacement)
    assert broken != default_text
    with pytest.raises(ConfigError, match=key_pattern):
        parse_config(broken)


def test_wrong_type_rejected(default_text):
    broken = default_text.replace("pole_pairs: 2", "pole_pairs: two")
    with pytest.raises(ConfigError, match="pole_pairs"):
        parse_config(broken)
    broken = default_text.replace("inertia: 0.05", "inertia: true")
    with pytest.raises(ConfigError, match="inertia"):
        parse_config(broken)


def test_envelope_positivity_enforced(default_text):
    broken = default_text.replace("torque: [0.0, 24.0]", "torque: [0.0, 40.0]")
    with pytest.raises(ConfigError, match="fuzzy.scaling"):
        parse_config(broken)


def test_scenario_profile_validation(default_text):
    broken = default_text.replace(
        "speed_reference: [[0.0, 150.0]]\n    load_torque: [[0.0, 6.0]]\n    flc_enabled: true\n    compensator_enabled: true\n\n  # The load steps",
        "speed_reference: [[1.0, 150.0]]\n    load_torque: [[0.0, 6.0]]\n    flc_enabled: true\n    compensator_enabled: true\n\n  # The load steps",
    )
    assert broken != default_text
    with pytest.raises(ConfigError, match=r"scenarios\[0\].*start at t = 0"):
        parse_config(broken)


def test_duplicate_scenario_names_rejected(default_text):
    broken = default_text.replace("name: short-demo", "name: quarter-load-search")
    with pytest.raises(ConfigError, match="duplicate scenario"):
        parse_config(broken)


def test_unknown_scenario_lookup_lists_known(config):
    with pytest.raises(ConfigError, match="quarter-load-search"):
        config.scenario("nope")


def test_commented_default_is_fully_documented(default_text):
    # The shipped file must carry its own explanation: every section present,
    # comments included.
    for section in ("machine:", "control:", "fuzzy:", "optimizer:", "compensator:", "telemetry:", "scenarios:"):
        assert re.search(rf"^{section}", default_text, flags=re.M)
    assert default_text.count("#") > 20
