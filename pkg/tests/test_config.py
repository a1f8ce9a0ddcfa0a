import pytest

from hvs5m.config import load_config, parse_config_file
from hvs5m.errors import ConfigError


class TestDefaults:
    def test_reference_settings(self):
        config = load_config()
        assert config.canny.upper == 140.0
        assert config.canny.lower == 5.0
        assert config.saliency.h == 100.0
        assert config.temphyst.tau == 12
        assert config.temphyst.gamma == 0.5
        assert config.training.lr == 1e-5
        assert config.training.decay_factor == 0.2
        assert config.training.decay_every == 2
        assert config.split.ratios == (0.6, 0.2, 0.2)
        assert config.head.fc_dim == 256 and config.head.hidden == 72

    def test_no_ablations_by_default(self):
        assert not load_config().ablation.any_enabled()


class TestParsing:
    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("canny.upper = 200\nsaliency.h = 60  # comment\n\n")
        config = load_config(path)
        assert config.canny.upper == 200.0
        assert config.saliency.h == 60.0
        assert config.canny.lower == 5.0  # untouched default

    def test_overrides_beat_file(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("canny.upper = 200\n")
        config = load_config(path, {"canny.upper": "250"})
        assert config.canny.upper == 250.0

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("canny.bogus = 1\n")
        with pytest.raises(ConfigError, match="bogus"):
            parse_config_file(path)

    def test_bad_boolean_rejected(self):
        with pytest.raises(ConfigError):
            load_config(None, {"ablation.disable_motion": "maybe"})

    def test_bad_value_propagates_section_validation(self):
        with pytest.raises(ConfigError):
            load_config(None, {"canny.upper": "3", "canny.lower": "10"})

    def test_missing_equals_rejected(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("canny.upper 200\n")
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_file(path)

    def test_fused_width_tracks_ablations(self):
        config = load_config(None, {"ablation.disable_motion": "true"})
        assert config.fused_width() == 8192
        config = load_config(None, {"ablation.disable_content": "true"})
        assert config.fused_width() == 4096 + 512
