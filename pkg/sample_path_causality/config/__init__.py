# 实验配置加载
import os
from typing import Any, Dict, Optional
from pydantic import ValidationError
from sample_path_causality.models.config import ExperimentConfig
from sample_path_causality.utils.app_config_utils import apply_overrides, read_yaml_file
from sample_path_causality.utils.env_utils import default_config_path
from sample_path_causality.utils.exceptions import ExperimentConfigError
from sample_path_causality.utils.log_utils import log


def load_experiment_config(config_path: Optional[str] = None,
                           overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    读取YAML配置、应用命令行覆盖项并校验

    Args:
        config_path: 配置文件路径；为空时使用默认路径，默认文件不存在则使用全部默认值
        overrides: 点分路径的覆盖项，如 {"experiment.seed": 3}

    Raises:
        ExperimentConfigError: 文件缺失、格式错误或存在未知/非法配置项
    """
    if config_path is None:
        config_path = default_config_path()
        if not os.path.exists(config_path):
            log.info(f"默认配置文件不存在: {config_path}，使用默认配置")
            raw: Dict[str, Any] = {}
        else:
            raw = read_yaml_file(config_path)
    else:
        raw = read_yaml_file(config_path)

    merged = apply_overrides(raw, overrides)
    try:
        config = ExperimentConfig.model_validate(merged)
    except ValidationError as e:
        raise ExperimentConfigError(f"配置校验失败: {e}") from e
    log.debug(f"配置加载完成: {config_path}")
    return config


__all__ = ["load_experiment_config", "ExperimentConfig"]
