"""
序列与轨迹文件的读写
"""

import json
import os
from typing import Dict, Optional, Tuple
import numpy as np
import pandas as pd
from pydantic import BaseModel
from sample_path_causality.models.trace import CausalTrace
from sample_path_causality.utils.exceptions import InputFormatError

# 轨迹文件的固定表头
TRACE_COLUMNS = ["i", "x_i", "y_i", "C_true", "C_star", "C_hat",
                 "f_c_hat", "f_r_hat", "f_c_star", "f_r_star", "regime"]
SEQUENCE_COLUMNS = ["i", "x", "y", "regime"]


def output_path(out_dir: str, stem: str, fmt: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, f"{stem}.{fmt}")


def _significant(frame: pd.DataFrame, precision: int) -> pd.DataFrame:
    """浮点列保留precision位有效数字，NaN写为null"""
    rounded = frame.astype(object)
    for column in frame.select_dtypes(include="float").columns:
        values = [None if np.isnan(v) else float(f"{v:.{precision}g}") for v in frame[column]]
        rounded[column] = pd.Series(values, index=frame.index, dtype=object)
    return rounded


def _json_scalar(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"无法序列化为JSON: {type(value)}")


def write_frame(frame: pd.DataFrame, path: str, fmt: str = "csv", precision: int = 12) -> str:
    """按固定精度写出表格，csv或json（逐行记录）"""
    if fmt == "csv":
        frame.to_csv(path, index=False, float_format=f"%.{precision}g", lineterminator="\n")
    elif fmt == "json":
        with open(path, "w", encoding="utf-8") as f:
            for record in _significant(frame, precision).to_dict(orient="records"):
                f.write(json.dumps(record, default=_json_scalar))
                f.write("\n")
    else:
        raise InputFormatError(f"未知的输出格式: {fmt}")
    return path


def write_model(model: BaseModel, path: str) -> str:
    """写出pydantic模型为JSON"""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(model.model_dump_json(indent=2))
        f.write("\n")
    return path


def _read_table(path: str) -> Tuple[pd.DataFrame, str]:
    if not os.path.exists(path):
        raise InputFormatError(f"输入文件不存在: {path}")
    fmt = "json" if path.endswith(".json") else "csv"
    try:
        if fmt == "csv":
            frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        else:
            frame = pd.read_json(path, orient="records", lines=True, dtype=False)
            frame = frame.astype(str)
    except (ValueError, pd.errors.ParserError) as e:
        raise InputFormatError(f"{path}: 无法解析: {e}") from e
    return frame, fmt


def _line_of(fmt: str, row: int) -> int:
    # csv第1行是表头
    return row + 2 if fmt == "csv" else row + 1


def sequence_frame(x: np.ndarray, y: np.ndarray, regimes: np.ndarray) -> pd.DataFrame:
    return pd.DataFrame({
        "i": np.arange(1, len(x) + 1),
        "x": np.asarray(x, dtype=np.int64),
        "y": np.asarray(y, dtype=np.int64),
        "regime": np.asarray(regimes, dtype=np.int64),
    })


def read_sequences(path: str) -> Dict[str, np.ndarray]:
    """
    读取序列文件，必须包含x、y两列，可选z列

    Raises:
        InputFormatError: 缺列或符号非法，错误信息包含文件行号
    """
    frame, fmt = _read_table(path)
    missing = [c for c in ("x", "y") if c not in frame.columns]
    if missing:
        raise InputFormatError(f"{path}: 缺少列 {missing}")
    if len(frame) == 0:
        raise InputFormatError(f"{path}: 文件中没有数据行")
    result = {}
    for column in [c for c in ("x", "y", "z") if c in frame.columns]:
        values = frame[column].str.strip()
        bad = ~values.str.fullmatch(r"\d+")
        if bad.any():
            row = int(np.argmax(bad.to_numpy()))
            raise InputFormatError(f"{path}:{_line_of(fmt, row)}: 列{column}的值非法: {frame[column].iloc[row]!r}")
        result[column] = values.astype(np.int64).to_numpy()
    return result


def trace_frame(estimate: CausalTrace, x: np.ndarray, y: np.ndarray) -> pd.DataFrame:
    """估计轨迹（已挂上真值与参考）转换为输出表格"""
    n = len(estimate)
    missing = np.full(n, np.nan)
    ref_c = estimate.reference_complete[:, 1] if estimate.reference_complete is not None else missing
    ref_r = estimate.reference_restricted[:, 1] if estimate.reference_restricted is not None else missing
    return pd.DataFrame({
        "i": estimate.rounds,
        "x_i": np.asarray(x, dtype=np.int64),
        "y_i": np.asarray(y, dtype=np.int64),
        "C_true": estimate.true_measure if estimate.true_measure is not None else missing,
        "C_star": estimate.reference_measure if estimate.reference_measure is not None else missing,
        "C_hat": estimate.measure,
        "f_c_hat": estimate.f_complete[:, 1],
        "f_r_hat": estimate.f_restricted[:, 1],
        "f_c_star": ref_c,
        "f_r_star": ref_r,
        "regime": estimate.regimes if estimate.regimes is not None else np.ones(n, dtype=np.int64),
    })[TRACE_COLUMNS]


def read_trace(path: str, direction: str) -> Tuple[CausalTrace, Optional[CausalTrace], np.ndarray]:
    """
    读取轨迹文件

    Returns:
        (估计轨迹, 参考轨迹或None, 效应符号序列)
    """
    frame, fmt = _read_table(path)
    missing = [c for c in TRACE_COLUMNS if c not in frame.columns]
    if missing:
        raise InputFormatError(f"{path}: 缺少列 {missing}")
    if len(frame) == 0:
        raise InputFormatError(f"{path}: 文件中没有数据行")
    numeric = {}
    for column in TRACE_COLUMNS:
        values = pd.to_numeric(frame[column].replace({"": "nan", "None": "nan"}), errors="coerce")
        required = column in ("i", "x_i", "y_i", "C_hat", "f_c_hat", "f_r_hat", "regime")
        if required and values.isna().any():
            row = int(np.argmax(values.isna().to_numpy()))
            raise InputFormatError(f"{path}:{_line_of(fmt, row)}: 列{column}的值非法: {frame[column].iloc[row]!r}")
        numeric[column] = values.to_numpy(dtype=float)

    def _binary(p_one: np.ndarray) -> np.ndarray:
        return np.column_stack([1.0 - p_one, p_one])

    regimes = numeric["regime"].astype(np.int64)
    estimate = CausalTrace(direction=direction, measure=numeric["C_hat"],
                           f_complete=_binary(numeric["f_c_hat"]), f_restricted=_binary(numeric["f_r_hat"]),
                           regimes=regimes)
    reference = None
    if not np.isnan(numeric["C_star"]).any():
        ref_c, ref_r = numeric["f_c_star"], numeric["f_r_star"]
        if np.isnan(ref_c).any() or np.isnan(ref_r).any():
            raise InputFormatError(f"{path}: C_star存在但参考分布列缺失")
        reference = CausalTrace(direction=direction, measure=numeric["C_star"],
                                f_complete=_binary(ref_c), f_restricted=_binary(ref_r),
                                source="reference", regimes=regimes)
        estimate = estimate.with_reference(reference.measure, reference.f_complete, reference.f_restricted)
    effect_column = "x_i" if direction == "yx" else "y_i"
    return estimate, reference, numeric[effect_column].astype(np.int64)
