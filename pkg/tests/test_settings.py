import logging

from config.settings import configure_logging, settings


def test_budget_from_environment(monkeypatch):
    assert settings.cylinder_budget == 10 ** 7
    monkeypatch.setenv("FRACTAL_SLICER_BUDGET", "1e5")
    assert settings.cylinder_budget == 100000
    monkeypatch.setenv("FRACTAL_SLICER_BUDGET", "many")
    assert settings.cylinder_budget == 10 ** 7


def test_threads_and_log_file(monkeypatch):
    assert settings.threads == 2
    monkeypatch.setenv("FRACTAL_SLICER_THREADS", "zero")
    assert settings.threads >= 1
    assert settings.log_file is None


def test_configure_logging_levels(tmp_path):
    configure_logging(0)
    assert logging.getLogger().level == logging.WARNING
    log_file = tmp_path / "run.log"
    configure_logging(2, str(log_file))
    logging.getLogger("modules.test").debug("詳細ログ")
    assert logging.getLogger().level == logging.DEBUG
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "詳細ログ" in log_file.read_text(encoding="utf-8")
    configure_logging(0)


def test_experiment_defaults():
    config = settings.get_experiment_config()
    assert config["r_coupling"] == 32.0
    assert config["growth_factor"] == 1.1
    assert settings.get_tolerance_config()["coincidence_tol"] == 1e-10
    assert settings.get_rectangle_config()["gap_divisor"] == 20.0
