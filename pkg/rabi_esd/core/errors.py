"""
异常定义

数值层抛出的所有领域异常都继承自 RabiError，CLI 据此映射退出码。
"""


class RabiError(Exception):
    """rabi-esd 异常基类"""


class NonConvergence(RabiError):
    """截断 N_tr 达到上限仍未满足收敛容差"""

    def __init__(self, message: str, last_deviation: float, n_tr: int):
        super().__init__(message)
        self.last_deviation = last_deviation
        self.n_tr = n_tr


class NormLoss(RabiError):
    """回变换到普通 Fock 基时丢失的范数超过阈值（n_fock 不足）"""

    def __init__(self, message: str, max_loss: float, n_fock: int):
        super().__init__(message)
        self.max_loss = max_loss
        self.n_fock = n_fock


class EigenSolverError(RabiError):
    """对称本征求解失败或残差超限"""


class InvalidDensity(RabiError):
    """约化密度矩阵不满足厄米、单位迹或半正定条件"""


class GridMismatch(RabiError):
    """参与组装的轨迹时间网格不一致"""


class StepUnderflow(RabiError):
    """RK4 步长减半后低于下限"""

    def __init__(self, message: str, dt: float, t: float):
        super().__init__(message)
        self.dt = dt
        self.t = t


class ConfigError(RabiError):
    """实验配置非法"""
