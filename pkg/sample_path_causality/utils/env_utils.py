import os
from dotenv import load_dotenv

# 加载当前工作目录下的.env文件
load_dotenv(os.path.join(os.getcwd(), '.env'), override=False)

# 实验配置文件路径
CONFIG_FILE_ENV = "SAMPLE_PATH_CAUSALITY_CONFIG_FILE"
DEFAULT_CONFIG_FILE = os.path.join("conf", "app.yml")


def get_var(var_name: str, default: str = None) -> str:
    """获取环境变量
    
    Args:
        var_name: 环境变量名
        default: 默认值
        
    Returns:
        环境变量值或默认值
    """
    return os.getenv(var_name, default)


def default_config_path() -> str:
    """默认配置文件路径，可通过环境变量SAMPLE_PATH_CAUSALITY_CONFIG_FILE指定"""
    return get_var(CONFIG_FILE_ENV, DEFAULT_CONFIG_FILE)
