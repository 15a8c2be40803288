#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
异常模块
库代码只抛出这里定义的异常，命令行层负责捕获并映射为退出码
"""

# 退出码
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY_FAILED = 2
EXIT_NUMERICAL = 3


class SpinBosonError(Exception):
    """所有异常的基类"""

    exit_code = EXIT_USAGE


class ModelError(SpinBosonError, ValueError):
    """模型参数、量子数标签或参考态不合法"""


class ConfigError(SpinBosonError):
    """配置文件或命令行参数错误"""


class NumericalError(SpinBosonError):
    """数值计算失败"""

    exit_code = EXIT_NUMERICAL


class NonSymmetricError(NumericalError, ValueError):
    """输入矩阵不对称"""


class ConvergenceError(NumericalError):
    """迭代未收敛"""


class SingularJacobianError(NumericalError):
    """Newton 迭代中 Jacobi 矩阵奇异"""


class NoDecreaseError(NumericalError):
    """线搜索无法降低残差"""


class CoincidentRootsError(NumericalError):
    """Bethe 根重合，单极点留数推导不再适用"""


class EnergyMismatchError(NumericalError):
    """能量公式与 z^N 系数比值不一致（公式抄写错误的信号）"""


class OperatorRemainderError(NumericalError):
    """除以 z 时出现非零余项（扇区标签错误的信号）"""


class InternalError(NumericalError):
    """理论上不应出现的内部状态"""
