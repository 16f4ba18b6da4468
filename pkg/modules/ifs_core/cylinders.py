import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from config.settings import settings
from utils.errors import BudgetExceeded, OutOfRange
from .types import IFS, Cylinder, Rect, Word

logger = logging.getLogger(__name__)

# (ratios, translations) -> 残すノードの bool マスク
PruneFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class CylinderSet:
    """配列で保持したシリンダーの集まり（words[i] ↔ ratios[i], translations[i]）"""

    ratios: np.ndarray
    translations: np.ndarray
    words: List[Word]

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def empty(cls, dim: int) -> "CylinderSet":
        return cls(np.zeros(0), np.zeros((0, dim)), [])

    def weights(self, s: float) -> np.ndarray:
        return self.ratios ** s

    def intervals(self, a: float, b: float, axis: int = 0) -> np.ndarray:
        """基準区間 [a,b] の像 ψ_ω([a,b]) を (n,2) 配列で返す"""
        lo = self.translations[:, axis] + self.ratios * a
        hi = self.translations[:, axis] + self.ratios * b
        return np.column_stack([lo, hi])

    def boxes(self, base: Rect) -> np.ndarray:
        """基準長方形の像を (n,4) 配列 [x0,x1,y0,y1] で返す"""
        x = self.intervals(base.x0, base.x1, axis=0)
        y = self.intervals(base.y0, base.y1, axis=1)
        return np.column_stack([x, y])

    def to_cylinders(self) -> List[Cylinder]:
        return [
            Cylinder(word, float(ratio), tuple(float(v) for v in translation))
            for word, ratio, translation in zip(self.words, self.ratios, self.translations)
        ]


def compose(parent: Cylinder, letter: int, ifs: IFS) -> Cylinder:
    """
    シリンダーに1文字を付け加える（ψ_ω ∘ ψ_letter）

    Args:
        parent (Cylinder): 親シリンダー
        letter (int): 付け加える文字（1始まり）
        ifs (IFS): 反復関数系

    Returns:
        Cylinder: ratio' = ρ_ω·ρ_j, translation' = t_ω + ρ_ω·w_j
    """
    ifs.check_letter(letter)
    sim = ifs.maps[letter - 1]
    translation = tuple(t + parent.ratio * w for t, w in zip(parent.translation, sim.translation))
    return Cylinder(parent.word + (letter,), parent.ratio * sim.ratio, translation)


def compose_word(word: Sequence[int], ifs: IFS) -> Cylinder:
    cylinder = Cylinder.identity()
    for letter in word:
        cylinder = compose(cylinder, letter, ifs)
    return cylinder


def _expand(ratios: np.ndarray, translations: np.ndarray, words: List[Word],
            base_ratios: np.ndarray, base_translations: np.ndarray):
    q = len(base_ratios)
    child_ratios = (ratios[:, None] * base_ratios[None, :]).ravel()
    child_translations = (
        translations[:, None, :] + ratios[:, None, None] * base_translations[None, :, :]
    ).reshape(-1, translations.shape[1])
    child_words = [w + (j,) for w in words for j in range(1, q + 1)]
    return child_ratios, child_translations, child_words


def enumerate_partition(base_ratios, base_translations, r: float,
                        prune: Optional[PruneFn] = None,
                        budget: Optional[int] = None) -> CylinderSet:
    """
    停止分割 Δ_r を幅優先で列挙する（prune で部分木を枝刈り可能）

    子の像は親の像に含まれるので、prune が偽を返したノードの子孫は
    全て除外してよい。結果は語の辞書順に並べる。

    Args:
        base_ratios: 生成写像の縮小率 (q,)
        base_translations: 生成写像の平行移動 (q,d)
        r (float): スケール（0 < r < 1）
        prune (Optional[PruneFn]): 残すノードを選ぶマスク関数
        budget (Optional[int]): 列挙数の上限（None なら settings の値）

    Returns:
        CylinderSet: Δ_r（枝刈り後）
    """
    if not 0.0 < r < 1.0:
        raise OutOfRange(f"r は (0,1) の範囲である必要があります: {r}")
    budget = settings.cylinder_budget if budget is None else budget
    slack = settings.get_tolerance_config()["partition_slack"]
    threshold = r * (1.0 + slack)

    base_ratios = np.asarray(base_ratios, dtype=float)
    base_translations = np.asarray(base_translations, dtype=float)
    if base_translations.ndim == 1:
        base_translations = base_translations[:, None]
    dim = base_translations.shape[1]
    q = len(base_ratios)

    ratios = np.ones(1)
    translations = np.zeros((1, dim))
    words: List[Word] = [()]
    done_ratios, done_translations, done_words = [], [], []
    n_done = 0

    while len(words):
        if n_done + len(words) * q > budget:
            raise BudgetExceeded(
                f"Δ_r の列挙数が上限 {budget} を超えます（r={r}）。r を大きくしてください"
            )
        ratios, translations, words = _expand(ratios, translations, words,
                                              base_ratios, base_translations)
        if prune is not None:
            keep = np.asarray(prune(ratios, translations), dtype=bool)
            ratios, translations = ratios[keep], translations[keep]
            words = [w for w, k in zip(words, keep) if k]

        stop = ratios <= threshold
        if stop.any():
            done_ratios.append(ratios[stop])
            done_translations.append(translations[stop])
            done_words.extend(w for w, s in zip(words, stop) if s)
            n_done += int(stop.sum())
        go = ~stop
        ratios, translations = ratios[go], translations[go]
        words = [w for w, g in zip(words, go) if g]

    if not done_words:
        return CylinderSet.empty(dim)

    all_ratios = np.concatenate(done_ratios)
    all_translations = np.concatenate(done_translations)
    order = sorted(range(len(done_words)), key=done_words.__getitem__)
    logger.debug(f"Δ_r 列挙完了: r={r}, 個数={len(order)}")
    return CylinderSet(all_ratios[order], all_translations[order],
                       [done_words[i] for i in order])


def enumerate_level(base_ratios, base_translations, depth: int,
                    budget: Optional[int] = None) -> CylinderSet:
    """長さ depth の全ての語を辞書順に列挙する"""
    budget = settings.cylinder_budget if budget is None else budget
    base_ratios = np.asarray(base_ratios, dtype=float)
    base_translations = np.asarray(base_translations, dtype=float)
    if base_translations.ndim == 1:
        base_translations = base_translations[:, None]
    if len(base_ratios) ** depth > budget:
        raise BudgetExceeded(f"深さ {depth} の語数が上限 {budget} を超えます")

    ratios = np.ones(1)
    translations = np.zeros((1, base_translations.shape[1]))
    words: List[Word] = [()]
    for _ in range(depth):
        ratios, translations, words = _expand(ratios, translations, words,
                                              base_ratios, base_translations)
    return CylinderSet(ratios, translations, words)


def partition_set(ifs: IFS, r: float, prune: Optional[PruneFn] = None) -> CylinderSet:
    return enumerate_partition(ifs.ratios, ifs.translations, r, prune=prune)


def stopping_partition(ifs: IFS, r: float) -> List[Cylinder]:
    """
    停止分割 Δ_r = {ω : ρ_ω ≤ r < ρ_{ω⁻}} を返す

    空語の比は 1 とみなすので、ρ_j ≤ r の1文字語はそのまま Δ_r に入る。

    Args:
        ifs (IFS): 反復関数系
        r (float): スケール（0 < r < 1）

    Returns:
        List[Cylinder]: 語の辞書順に並んだシリンダーのリスト
    """
    cylinders = partition_set(ifs, r)
    logger.info(f"Δ_r を列挙しました: r={r}, |Δ_r|={len(cylinders)}")
    return cylinders.to_cylinders()


def sample_words(ifs: IFS, count: int, length: int, seed: int) -> List[Word]:
    """重み p_j = ρ_j^s に従って文字を独立に選び、長さ length の語を count 個返す"""
    rng = np.random.default_rng(seed)
    p = ifs.weights / ifs.weights.sum()
    letters = rng.choice(ifs.q, size=(count, length), p=p) + 1
    return [tuple(int(v) for v in row) for row in letters]
