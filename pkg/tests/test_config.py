import logging

import pytest

import oqrw
from oqrw.exceptions import InvalidParameterError
from oqrw.utils.config import RunConfig, load_defaults, load_yaml_config
from oqrw.utils.logging import configure_logging
from oqrw.utils.parser import OQRWArgParser


@pytest.fixture
def parser():
    return OQRWArgParser()


class TestYamlConfig:
    """Loading the defaults section of a config file."""

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_yaml_config(tmp_path / "absent.yaml")

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("defaults: [unclosed\n")
        with pytest.raises(ValueError):
            load_yaml_config(path)

    def test_values_are_coerced(self, tmp_path, caplog):
        path = tmp_path / "config.yaml"
        path.write_text("defaults:\n  decision_tol: 1e-6\n  n_max: '50'\n  threads: 2\n  colour: blue\n")
        defaults = load_defaults(path)

        assert defaults == {"decision_tol": 1e-6, "n_max": 50, "threads": 2}
        assert "colour" in caplog.text

    def test_empty_file(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("")
        assert load_defaults(path) == {}

    def test_bad_value(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("defaults:\n  n_max: many\n")
        with pytest.raises(ValueError):
            load_defaults(path)

    def test_top_level_list(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ValueError):
            load_defaults(path)


class TestRunConfig:
    """Validation and precedence of run settings."""

    def test_package_defaults(self):
        config = RunConfig(command="validate")

        assert config.kraus_tol == oqrw.kraus_tol
        assert config.n_max == oqrw.n_max
        assert config.fmt == "csv"
        assert config.kind == "forward"

    @pytest.mark.parametrize(
        "overrides",
        [
            {"command": "simulate"},
            {"kraus_tol": 0.0},
            {"decision_tol": -1e-8},
            {"n": -1},
            {"n_max": -5},
            {"fmt": "xml"},
            {"kind": "sideways"},
            {"threads": 0},
        ],
    )
    def test_rejects_invalid_settings(self, overrides):
        values = {"command": "recurrence", **overrides}
        with pytest.raises(InvalidParameterError):
            RunConfig(**values)

    def test_flags_override_config_file(self, parser):
        args = parser.parse_args(
            ["recurrence", "w.json", "s.json", "e.json", "--criterion", "phi_recurrent", "--n-max", "7"]
        )
        config = RunConfig.from_namespace(args, {"n_max": 50, "decision_tol": 1e-6})

        assert config.n_max == 7
        assert config.decision_tol == 1e-6
        assert config.inputs == {"walk": "w.json", "state": "s.json", "proj": "e.json"}
        assert config.params == {"criterion": "phi_recurrent"}

    def test_config_file_fills_missing_flags(self, parser):
        args = parser.parse_args(["evolve", "w.json", "s.json", "-n", "3", "--format", "json", "--threads", "2"])
        config = RunConfig.from_namespace(args, {"fmt": "csv", "trace_tol": 1e-6})

        assert config.n == 3
        assert config.fmt == "json"
        assert config.threads == 2
        assert config.trace_tol == 1e-6

    def test_observable_list(self, parser):
        args = parser.parse_args(["qmc-eval", "w.json", "s.json", "x0.json", "x1.json", "--kind", "dual"])
        config = RunConfig.from_namespace(args)

        assert config.inputs["observables"] == ["x0.json", "x1.json"]
        assert config.kind == "dual"
        assert config.params["method"] == "product"

    def test_to_dict(self, parser):
        args = parser.parse_args(["validate", "w.json", "--tol", "1e-6"])
        data = RunConfig.from_namespace(args).to_dict()

        assert data["command"] == "validate"
        assert data["kraus_tol"] == 1e-6
        assert data["inputs"] == {"walk": "w.json"}


class TestLogging:
    """Log level selection."""

    @pytest.fixture(autouse=True)
    def restore_level(self):
        yield
        configure_logging("WARNING")

    def test_explicit_level(self):
        assert configure_logging("debug") == logging.DEBUG
        assert logging.getLogger("oqrw").level == logging.DEBUG

    def test_environment_level(self, monkeypatch):
        monkeypatch.setenv("OQRW_LOG", "info")
        assert configure_logging() == logging.INFO

    def test_unknown_level_falls_back_to_warning(self):
        assert configure_logging("chatty") == logging.WARNING

    def test_single_handler(self):
        configure_logging()
        configure_logging()

        handlers = [h for h in logging.getLogger("oqrw").handlers if getattr(h, "_oqrw", False)]
        assert len(handlers) == 1
