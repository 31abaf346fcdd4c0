import os
import sys
from typing import Optional
from loguru import logger

# 控制台输出格式
CONSOLE_FORMAT = ("<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
                  "{process.name} | " # 进程名
                  "{thread.name} | " # 线程名
                  "<level>{level}</level> | "
                  "<cyan>{module}</cyan>.<cyan>{function}</cyan>" # 模块名.方法名
                  ":<cyan>{line}</cyan>: " # 行号
                  "- <level>{message}</level>") # 日志内容

# 输出到文件的格式
FILE_FORMAT = ("{time:YYYY-MM-DD HH:mm:ss} | "
               "{process.name} | "
               "{thread.name} | "
               "{level} | "
               "{module}.{function}"
               ":{line}: "
               "- {message}")


class CausalLogger:
  def __init__(self, level: str = "INFO"):
    self.logger = logger
    self.configure(level)

  def configure(self, level: str = "INFO", log_file: Optional[str] = None):
    """
    重新配置日志输出

    Args:
        level: 日志级别
        log_file: 日志文件路径，为空时只输出到控制台
    """
    # 清空所有配置
    self.logger.remove()
    # 控制台输出到stderr，stdout留给报告
    self.logger.add(sys.stderr, level=level, format=CONSOLE_FORMAT)

    if log_file:
      log_dir = os.path.dirname(os.path.abspath(log_file))
      os.makedirs(log_dir, exist_ok=True)
      self.logger.add(
        log_file,
        level=level,
        rotation="100 MB", # 每个日志文件最大100MB
        retention="10 days", # 保留10天的日志文件
        encoding="utf-8",
        format=FILE_FORMAT
      )

  def get_logger(self):
    return self.logger


_causal_logger = CausalLogger(os.getenv("SAMPLE_PATH_CAUSALITY_LOG_LEVEL", "INFO"))
log = _causal_logger.get_logger()


def configure_logging(level: str = "INFO", log_file: Optional[str] = None):
  """按实验配置重新设置日志级别和日志文件"""
  _causal_logger.configure(level, log_file)
