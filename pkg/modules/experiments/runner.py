import logging
from pathlib import Path
from typing import Any, Dict, Optional

from config.settings import settings
from modules import __version__
from utils.file_utils import OutputManager
from utils.serialization import ifs_to_dict
from .divergence import divergence_study, slice_dimension_study
from .scenario import Scenario

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["theta", "t_index", "t", "delta", "r", "premeasure", "lower_bound",
                  "items", "components", "strategy", "status"]
DIM_COLUMNS = ["theta", "t_index", "t", "slope", "residual", "empty", "status"]


def resolve_output_dir(sc: Scenario, output_dir: Optional[str] = None) -> Path:
    if output_dir is not None:
        return Path(output_dir)
    if sc.output_dir is not None:
        return Path(sc.output_dir)
    return settings.output_dir / sc.name


def run_scenario(sc: Scenario, output_dir: Optional[str] = None,
                 threads: Optional[int] = None) -> Dict[str, Any]:
    """
    シナリオの study を実行し results.csv / dims.csv / summary.json を書き出す

    同じシナリオとシードなら出力はバイト単位で一致する（時刻やスレッド数は含めない）。

    Args:
        sc (Scenario): シナリオ
        output_dir (Optional[str]): 出力先（None ならシナリオまたは設定の値）
        threads (Optional[int]): ワーカー数

    Returns:
        Dict[str, Any]: summary.json と同じ内容
    """
    manager = OutputManager(resolve_output_dir(sc, output_dir))
    ifs = sc.load_ifs()
    summary: Dict[str, Any] = {
        "version": __version__,
        "scenario": sc.to_dict(),
        "seed": sc.seed,
        "ifs": ifs_to_dict(ifs),
        "dimension": ifs.dimension,
        "outputs": [],
    }

    if "divergence" in sc.studies:
        trend = divergence_study(sc, threads)
        manager.write_csv(trend.to_frame()[RESULT_COLUMNS], "results.csv")
        summary["divergence"] = trend.to_dict()
        summary["outputs"].append("results.csv")

    if "slice_dimension" in sc.studies:
        dims = slice_dimension_study(sc, threads)
        manager.write_csv(dims.to_frame()[DIM_COLUMNS], "dims.csv")
        summary["slice_dimension"] = dims.to_dict()
        summary["outputs"].append("dims.csv")

    summary["outputs"].append("summary.json")
    manager.write_json(summary, "summary.json")
    logger.info(f"シナリオ {sc.name} の結果を書き出しました: {manager.output_dir}")
    return summary
