import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from config.settings import settings
from modules.ifs_core import IFS, sample_natural_measure
from modules.projection import Direction, Frame
from utils.errors import ScenarioError, ValidationError
from utils.serialization import format_float, parse_ifs_argument

logger = logging.getLogger(__name__)

WEIGHTINGS = ("mu", "uniform")
STUDIES = ("divergence", "slice_dimension")
MIN_GRID = 16
MIN_DELTA_RUNGS = 4


@dataclass
class GridSpec:
    """t の格子：π♯μ で重み付けした標本、[a,b] 上の一様標本、または明示した値"""

    count: int = 64
    weighting: str = "mu"
    values: Optional[List[float]] = None

    def build(self, ifs: IFS, frame: Frame, seed: int) -> np.ndarray:
        if self.values is not None:
            return np.sort(np.asarray(self.values, dtype=float))
        if self.weighting == "mu":
            points = sample_natural_measure(ifs, self.count, seed)
            return np.sort(frame.direction.project(points))
        a, b = frame.extent
        rng = np.random.default_rng(seed)
        return np.sort(rng.uniform(a, b, size=self.count))


@dataclass
class Scenario:
    ifs_ref: str
    thetas: List[float]
    deltas: List[float]
    grid: GridSpec = field(default_factory=GridSpec)
    r_coupling: float = 32.0
    window_growth: float = 0.0
    slice_r: List[float] = field(default_factory=list)
    seed: int = 0
    output_dir: Optional[str] = None
    studies: List[str] = field(default_factory=lambda: list(STUDIES))
    name: str = "scenario"

    def __post_init__(self):
        if not self.slice_r:
            self.slice_r = list(settings.get_experiment_config()["slice_r_ladder"])
        self.validate()

    def validate(self) -> None:
        """シナリオの検証（違反は ScenarioError）"""
        if not self.thetas:
            raise ScenarioError("方向が指定されていません")
        if len(self.deltas) < MIN_DELTA_RUNGS:
            raise ScenarioError(f"δ の段は{MIN_DELTA_RUNGS}段以上が必要です: {self.deltas}")
        if any(d <= 0 for d in self.deltas) or any(x <= y for x, y in zip(self.deltas, self.deltas[1:])):
            raise ScenarioError(f"δ の段は正で狭義単調減少である必要があります: {self.deltas}")
        if self.r_coupling <= 0:
            raise ScenarioError(f"r_coupling は正である必要があります: {self.r_coupling}")
        if self.window_growth < 0:
            raise ScenarioError(f"window_growth は0以上である必要があります: {self.window_growth}")
        if self.grid.weighting not in WEIGHTINGS:
            raise ScenarioError(f"weighting は {WEIGHTINGS} のいずれかです: {self.grid.weighting}")
        if self.grid.values is None and self.grid.count < MIN_GRID:
            raise ScenarioError(f"t の格子は{MIN_GRID}点以上が必要です: {self.grid.count}")
        if self.grid.values is not None and len(self.grid.values) == 0:
            raise ScenarioError("t の値のリストが空です")
        unknown = [s for s in self.studies if s not in STUDIES]
        if unknown:
            raise ScenarioError(f"未知の study です: {unknown}（候補: {STUDIES}）")
        if "slice_dimension" in self.studies:
            ladder = self.slice_r
            if len(ladder) < 4 or any(not 0 < r < 1 for r in ladder) \
                    or any(x <= y for x, y in zip(ladder, ladder[1:])):
                raise ScenarioError(f"slice_r は (0,1) 内の狭義単調減少な4段以上が必要です: {ladder}")

    def load_ifs(self) -> IFS:
        try:
            return parse_ifs_argument(self.ifs_ref)
        except ValidationError as e:
            raise ScenarioError(f"シナリオの IFS を読めません: {str(e)}")

    def cover_resolution(self, delta: float) -> float:
        """
        δ の段で使う被覆の解像度 r = δ / (r_coupling·(δ_0/δ)^window_growth)

        window_growth = 0 なら r = δ/r_coupling で、δ/r の窓は段によらず一定。
        正なら δ を小さくするほど窓が広がり、より細かい構造まで詰め込める。
        """
        window = self.r_coupling * (self.deltas[0] / delta) ** self.window_growth
        return delta / window

    @property
    def directions(self) -> List[Direction]:
        return [Direction(theta) for theta in self.thetas]

    @classmethod
    def from_dict(cls, data: Dict[str, Any], name: str = "scenario") -> "Scenario":
        """
        TOML の内容（[ifs] [direction] [grid] [ladder] [output] と seed）からシナリオを作る

        Args:
            data (Dict[str, Any]): tomllib で読んだ辞書
            name (str): シナリオ名

        Returns:
            Scenario: 検証済みのシナリオ
        """
        try:
            ifs_section = data["ifs"]
            if "path" in ifs_section:
                ifs_ref = str(ifs_section["path"])
            else:
                ifs_ref = f"preset:{ifs_section['preset']}"
                if "rho" in ifs_section:
                    rho = ifs_section["rho"]
                    ifs_ref += f":{rho}" if isinstance(rho, (int, str)) else f":{format_float(rho)}"

            direction = data["direction"]
            if "thetas" in direction:
                thetas = [float(v) for v in direction["thetas"]]
            elif "vector" in direction:
                thetas = [Direction.from_vector(*direction["vector"]).theta]
            else:
                thetas = [float(direction["theta"])]

            grid_section = data.get("grid", {})
            values = grid_section.get("values")
            grid = GridSpec(
                count=int(grid_section.get("count", 64)),
                weighting=str(grid_section.get("weighting", "mu")),
                values=[float(v) for v in values] if values is not None else None,
            )

            ladder = data["ladder"]
            deltas = [float(v) for v in ladder["delta"]]
            config = settings.get_experiment_config()
            output = data.get("output", {})
            return cls(
                ifs_ref=ifs_ref,
                thetas=thetas,
                deltas=deltas,
                grid=grid,
                r_coupling=float(ladder.get("r_coupling", config["r_coupling"])),
                window_growth=float(ladder.get("window_growth", 0.0)),
                slice_r=[float(v) for v in ladder.get("slice_r", config["slice_r_ladder"])],
                seed=int(data.get("seed", grid_section.get("seed", 0))),
                output_dir=output.get("dir"),
                studies=list(output.get("studies", STUDIES)),
                name=str(data.get("name", name)),
            )
        except ScenarioError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ScenarioError(f"シナリオの形式が不正です: {type(e).__name__}: {str(e)}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    TOML のシナリオファイルを読み込む

    Args:
        path (Union[str, Path]): ファイルパス

    Returns:
        Scenario: 検証済みのシナリオ
    """
    path = Path(path)
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as e:
        raise ScenarioError(f"シナリオファイルを開けません: {path}: {str(e)}")
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError(f"シナリオファイルが TOML として不正です: {path}: {str(e)}")
    scenario = Scenario.from_dict(data, name=path.stem)
    logger.info(f"シナリオを読み込みました: {path}（方向 {len(scenario.thetas)} 個, δ {len(scenario.deltas)} 段）")
    return scenario
