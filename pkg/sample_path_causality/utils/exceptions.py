class CausalMeasureException(Exception):
    """因果度量库的基础异常类"""
    pass


class PmfError(CausalMeasureException):
    """概率质量函数构造或符号越界错误"""
    pass


class AlphabetMismatchError(PmfError):
    """两个分布的字母表大小不一致"""
    pass


class ContextError(CausalMeasureException):
    """预测器上下文格式错误"""
    pass


class PredictorError(CausalMeasureException):
    """预测器配置错误（未知类型、非法网格等）"""
    pass


class GroundTruthError(CausalMeasureException):
    """真值计算错误"""
    pass


class EnumerationLimitError(GroundTruthError):
    """穷举的历史长度超出上限"""
    pass


class FilterDegeneracyError(GroundTruthError):
    """隐藏状态滤波出现0/0退化"""
    pass


class TraceError(CausalMeasureException):
    """因果轨迹错误"""
    pass


class LengthMismatchError(TraceError):
    """序列或轨迹长度不一致"""
    pass


class RegretError(CausalMeasureException):
    """遗憾界计算输入非法"""
    pass


class ExperimentConfigError(CausalMeasureException):
    """实验配置错误"""
    pass


class InputFormatError(CausalMeasureException):
    """输入文件格式错误"""
    pass


class CheckFailure(CausalMeasureException):
    """复现或验收检查未通过"""
    pass
