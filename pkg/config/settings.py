import os
import sys
import logging
from pathlib import Path
from typing import Any, Dict, Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Settings:
    def __init__(self):
        # 環境変数はアクセスのたびに読み直す（テストでの上書きを反映するため）
        self.default_budget = 10 ** 7

    @property
    def output_dir(self) -> Path:
        return Path(os.getenv("FRACTAL_SLICER_OUTPUT_DIR", "output"))

    @property
    def cylinder_budget(self) -> int:
        """
        シリンダー列挙の上限数

        Returns:
            int: FRACTAL_SLICER_BUDGET が設定されていればその値、なければ 10^7
        """
        raw = os.getenv("FRACTAL_SLICER_BUDGET", "")
        try:
            value = int(float(raw)) if raw else self.default_budget
        except ValueError:
            logging.getLogger(__name__).warning(
                f"FRACTAL_SLICER_BUDGET の値が不正です: {raw!r}（既定値を使用）"
            )
            value = self.default_budget
        return max(1, value)

    @property
    def threads(self) -> int:
        raw = os.getenv("FRACTAL_SLICER_THREADS", "")
        if raw.isdigit() and int(raw) > 0:
            return int(raw)
        return os.cpu_count() or 1

    @property
    def log_file(self) -> Optional[str]:
        value = os.getenv("FRACTAL_SLICER_LOG_FILE", "fractal_slicer.log")
        return value or None

    def get_tolerance_config(self) -> Dict[str, float]:
        return {
            "moran_tol": 1e-13,
            "coincidence_tol": 1e-10,
            "partition_slack": 1e-12,
            "cover_slack": 1e-12,
        }

    def get_experiment_config(self) -> Dict[str, Any]:
        return {
            "r_coupling": 32.0,
            "growth_factor": 1.1,
            "slice_band": 0.15,
            "density_stability": 1.2,
            "density_ladder": [0.05, 0.01, 0.002],
            "slice_r_ladder": [0.1, 0.03, 0.01, 0.003, 0.001, 0.0003, 0.0001],
            "sweep_depth": 4,
            "burn_in": 64,
            "content_decay": 0.5,
        }

    def get_rectangle_config(self) -> Dict[str, Any]:
        return {
            "gap_divisor": 20.0,
            "tau_resolution": 1e-3,
            "k_budget": 60,
            "ssc_depth": 6,
        }


def configure_logging(verbosity: int = 0, log_file: Optional[str] = None) -> None:
    """
    ロギングの設定（ファイル + ストリーム）

    Args:
        verbosity (int): 0=WARNING, 1=INFO, 2以上=DEBUG
        log_file (Optional[str]): ログファイルのパス（None なら settings の値）
    """
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG

    # 結果は stdout に出すため、ログは stderr に流す
    handlers = [logging.StreamHandler(sys.stderr)]
    path = log_file if log_file is not None else settings.log_file
    if path:
        handlers.append(logging.FileHandler(path, encoding='utf-8'))

    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


settings = Settings()
