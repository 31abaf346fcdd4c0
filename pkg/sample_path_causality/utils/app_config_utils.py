"""
实验配置文件解析工具
"""

import os
import re
import copy
import yaml
from typing import Dict, Any, Union, Optional
from sample_path_causality.utils.env_utils import get_var
from sample_path_causality.utils.exceptions import ExperimentConfigError

# 环境变量引用正则表达式: ${ENV_VAR:default_value}
ENV_VAR_PATTERN = re.compile(r'\$\{([^:}]+)(?::([^}]*))?\}')

# 配置参数引用正则表达式: ${config.key}
CONFIG_VAR_PATTERN = re.compile(r'\$\{([a-zA-Z0-9_.]+)\}')


def substitute_env_vars(value: Union[str, Dict[str, Any], Any], config_dict: Dict[str, Any] = None) -> Union[str, Dict[str, Any], Any]:
    """递归替换字符串中的环境变量引用和配置参数引用
    
    Args:
        value: 要处理的值，可以是字符串、字典或其他类型
        config_dict: 扁平化的配置字典，用于解析配置参数引用
        
    Returns:
        替换后的对应值
    """
    if isinstance(value, str):
        def replace_config_match(match: re.Match) -> str:
            config_key = match.group(1)
            if config_dict is not None and config_key in config_dict:
                return str(config_dict[config_key])
            # 找不到时保留原字符串，交给环境变量解析
            return match.group(0)

        result = CONFIG_VAR_PATTERN.sub(replace_config_match, value)

        def replace_env_match(match: re.Match) -> str:
            env_var = match.group(1)
            default = match.group(2)
            value = get_var(env_var)
            if value is not None:
                return value
            if default is None:
                # 没有默认值的引用留到下一轮按配置参数解析
                return match.group(0)
            return default

        return ENV_VAR_PATTERN.sub(replace_env_match, result)
    elif isinstance(value, dict):
        return {
            key: substitute_env_vars(val, config_dict)
            for key, val in value.items()
        }
    elif isinstance(value, list):
        return [substitute_env_vars(item, config_dict) for item in value]
    else:
        return value


def _flatten(cfg: Dict[str, Any], prefix: str = '') -> Dict[str, Any]:
    lookup = {}
    for k, v in cfg.items():
        full_key = f"{prefix}.{k}" if prefix else k
        if isinstance(v, dict):
            lookup.update(_flatten(v, full_key))
        else:
            lookup[full_key] = v
    return lookup


def parse_yaml_content(config_dict: Dict[str, Any]) -> Dict[str, Any]:
    """解析 YAML 内容，多轮替换直到引用关系稳定
    
    Args:
        config_dict: 包含 YAML 内容的字典
        
    Returns:
        解析后的配置字典
    """
    max_iterations = 10
    current_config = config_dict

    for _ in range(max_iterations):
        flat_lookup = _flatten(current_config)
        new_config = substitute_env_vars(current_config, flat_lookup)
        if new_config == current_config:
            break
        current_config = new_config

    return current_config


def read_yaml_file(file_path: str) -> Dict[str, Any]:
    """读取 YAML 配置文件并替换环境变量
    
    Args:
        file_path: YAML 文件路径
        
    Returns:
        配置字典
        
    Raises:
        ExperimentConfigError: 文件不存在、YAML 格式错误或读取失败
    """
    if not os.path.exists(file_path):
        raise ExperimentConfigError(f"配置文件不存在: {file_path}")

    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            config_dict = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ExperimentConfigError(f"YAML 格式错误: {e}") from e
    except IOError as e:
        raise ExperimentConfigError(f"文件读取错误: {e}") from e

    if config_dict is None:
        return {}
    if not isinstance(config_dict, dict):
        raise ExperimentConfigError(f"配置文件顶层必须是键值映射: {file_path}")
    return parse_yaml_content(config_dict)


def apply_overrides(config_dict: Dict[str, Any], overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    """按点分路径覆盖配置项（命令行参数优先于配置文件）
    
    Args:
        config_dict: 原始配置字典（不会被修改）
        overrides: 形如 {"experiment.seed": 7} 的覆盖项，值为None时忽略
        
    Returns:
        覆盖后的新配置字典
    """
    merged = copy.deepcopy(config_dict)
    for dotted_key, value in (overrides or {}).items():
        if value is None:
            continue
        node = merged
        *parents, leaf = dotted_key.split('.')
        for key in parents:
            child = node.get(key)
            if child is None:
                child = {}
                node[key] = child
            elif not isinstance(child, dict):
                raise ExperimentConfigError(f"无法覆盖配置项 {dotted_key}: {key} 不是映射")
            node = child
        node[leaf] = value
    return merged
