import json
import math
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from .errors import IFSFormatError, ValidationError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = ".17g"


def format_float(value: float) -> str:
    """17桁の10進文字列（読み戻すと同じ float になる）"""
    return format(float(value), FLOAT_FORMAT)


def encode_scalar(value) -> Union[str, Dict[str, int]]:
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    return format_float(value)


def decode_scalar(value) -> Union[float, Fraction]:
    """
    JSON の数値表現を読む

    整数と {"num","den"} と "p/q" は Fraction、それ以外の数値・10進文字列は float。

    Args:
        value: JSON から読んだ値

    Returns:
        Union[float, Fraction]: 読み取った値
    """
    if isinstance(value, bool):
        raise IFSFormatError(f"真偽値は数値として使えません: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        try:
            num, den = value["num"], value["den"]
        except KeyError:
            raise IFSFormatError(f"有理数は {{'num','den'}} で指定してください: {value!r}")
        if not isinstance(num, int) or not isinstance(den, int) or isinstance(num, bool) or den == 0:
            raise IFSFormatError(f"有理数の分子・分母が不正です: {value!r}")
        return Fraction(num, den)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return Fraction(text)
            return float(text)
        except (ValueError, ZeroDivisionError):
            raise IFSFormatError(f"数値として読めません: {value!r}")
    raise IFSFormatError(f"数値として読めません: {value!r}")


def ifs_to_dict(ifs) -> Dict[str, Any]:
    return {
        "maps": [
            {
                "ratio": encode_scalar(m.ratio),
                "translation": [encode_scalar(v) for v in m.translation],
            }
            for m in ifs.maps
        ]
    }


def ifs_from_dict(data: Dict[str, Any]):
    # 循環 import を避ける
    from modules.ifs_core import IFS

    try:
        maps = data["maps"]
        pairs = []
        for entry in maps:
            translation = entry["translation"]
            if not isinstance(translation, list) or len(translation) != 2:
                raise IFSFormatError(f"translation は2要素のリストである必要があります: {translation!r}")
            pairs.append((decode_scalar(entry["ratio"]),
                          tuple(decode_scalar(v) for v in translation)))
    except (KeyError, TypeError) as e:
        raise IFSFormatError(f"IFS の形式が不正です: {str(e)}")
    return IFS.from_pairs(pairs)


def load_ifs(path: Union[str, Path]):
    """
    IFS を JSON ファイルから読み込む

    Args:
        path (Union[str, Path]): ファイルパス

    Returns:
        IFS: 読み込んだ反復関数系
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise IFSFormatError(f"IFS ファイルを開けません: {path}: {str(e)}")
    except json.JSONDecodeError as e:
        raise IFSFormatError(f"IFS ファイルが JSON として不正です: {path}: {str(e)}")
    if not isinstance(data, dict):
        raise IFSFormatError(f"IFS ファイルの最上位はオブジェクトである必要があります: {path}")
    ifs = ifs_from_dict(data)
    logger.info(f"IFS を読み込みました: {path}（写像 {ifs.q} 個）")
    return ifs


def dump_ifs(ifs, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(ifs_to_dict(ifs), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def parse_ifs_argument(value: str):
    """
    --ifs の値を読む：JSON ファイルのパス、または preset:<name>[:<rho>]

    Args:
        value (str): コマンドライン引数

    Returns:
        IFS: 反復関数系
    """
    from modules.ifs_core import preset_by_name

    if value.startswith("preset:"):
        parts = value.split(":")
        if len(parts) not in (2, 3) or not parts[1]:
            raise ValidationError(f"プリセットの指定が不正です: {value}（preset:<name>[:<rho>]）")
        args = [decode_scalar(parts[2])] if len(parts) == 3 else []
        return preset_by_name(parts[1], *args)
    return load_ifs(value)


def parse_number_list(text: str) -> List[float]:
    """'0.5,0.3,0.3' のようなカンマ区切りの数値列"""
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"数値のリストとして読めません: {text!r}")


def to_jsonable(value: Any) -> Any:
    """numpy 配列・Fraction・非有限の float を JSON で表せる値に変換する"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Fraction):
        return encode_scalar(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, Path):
        return str(value)
    return value
