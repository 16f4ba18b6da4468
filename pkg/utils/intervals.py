import numpy as np


def merge_intervals(intervals: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """
    重なる区間（接するものを含む）を結合する

    例: [[0,3],[2,6],[5,9],[10,14],[12,16]] -> [[0,9],[10,16]]

    Args:
        intervals (np.ndarray): (n,2) の閉区間
        tol (float): この距離以下の隙間も結合する

    Returns:
        np.ndarray: 左端でソートされた互いに素な区間 (m,2)
    """
    intervals = np.asarray(intervals, dtype=float).reshape(-1, 2)
    if len(intervals) == 0:
        return intervals
    order = np.lexsort((intervals[:, 1], intervals[:, 0]))
    starts = intervals[order, 0]
    ends = np.maximum.accumulate(intervals[order, 1])
    new_group = np.ones(len(starts), dtype=bool)
    new_group[1:] = starts[1:] > ends[:-1] + tol
    group = np.cumsum(new_group) - 1
    merged_starts = starts[new_group]
    merged_ends = np.full(len(merged_starts), -np.inf)
    np.maximum.at(merged_ends, group, ends)
    merged_ends = np.maximum(merged_ends, merged_starts)
    return np.column_stack([merged_starts, merged_ends])


def union_length(intervals: np.ndarray) -> float:
    merged = merge_intervals(intervals)
    if len(merged) == 0:
        return 0.0
    return float(np.sum(merged[:, 1] - merged[:, 0]))
