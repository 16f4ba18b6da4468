import json
import logging
from pathlib import Path
from typing import Any, Dict

import pandas as pd

from .serialization import to_jsonable

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


class OutputManager:
    def __init__(self, output_dir: str = "output"):
        """
        出力ディレクトリ管理クラスの初期化

        Args:
            output_dir (str): 結果を書き出すディレクトリ
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.output_dir / name

    def write_csv(self, frame: pd.DataFrame, name: str) -> Path:
        """
        表を CSV に書き出す（float は17桁、改行は LF）

        Args:
            frame (pd.DataFrame): 書き出す表
            name (str): ファイル名

        Returns:
            Path: 書き出したファイルのパス
        """
        try:
            path = self.path(name)
            frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
            logger.info(f"CSV を書き出しました: {path}（{len(frame)} 行）")
            return path
        except Exception as e:
            logger.error(f"CSV の書き出しに失敗しました: {str(e)}")
            raise

    def write_json(self, data: Dict[str, Any], name: str) -> Path:
        """
        JSON を書き出す（キーはソート、インデント2、タイムスタンプなし）

        Args:
            data (Dict[str, Any]): 書き出す内容
            name (str): ファイル名

        Returns:
            Path: 書き出したファイルのパス
        """
        try:
            path = self.path(name)
            text = json.dumps(to_jsonable(data), indent=2, sort_keys=True, ensure_ascii=False)
            path.write_text(text + "\n", encoding="utf-8")
            logger.info(f"JSON を書き出しました: {path}")
            return path
        except Exception as e:
            logger.error(f"JSON の書き出しに失敗しました: {str(e)}")
            raise

    def write_manifest(self, manifest: Dict[str, Any]) -> Path:
        return self.write_json(manifest, "manifest.json")

    def list_outputs(self) -> list:
        return sorted(p.name for p in self.output_dir.iterdir() if p.is_file())

