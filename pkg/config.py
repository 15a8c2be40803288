#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
配置文件
管理程序中的常量和配置项（容差、迭代上限、预设默认参数与测试网格）
"""

# 数值容差配置
EIGEN_TOL = 1e-12  # Jacobi 非对角范数收敛阈值（相对 ‖A‖）
SYMMETRY_TOL = 1e-12  # 对称性检查（相对）
ROOT_TOL = 1e-10  # Aberth 迭代步长阈值（相对）
CLUSTER_TOL = 1e-6  # 根簇判定距离（相对尺度）
CLUSTER_SPREAD_TOL = 1e-3  # Newton 修正量与最近根距离之比超过此值视为根簇
COEFF_TOL = 1e-12  # 由本征向量换算出的单项式系数的相对精度
NEWTON_TOL = 1e-10  # Newton 残差范数阈值
NEWTON_FD_STEP = 1e-7  # 前向差分步长系数 h = 1e-7·(1+|x|)
BAE_TOL = 1e-6  # Bethe 方程缩放残差阈值
MATCH_TOL = 1e-8  # 能谱比对相对容差
ALGEBRA_TOL = 1e-10  # 多项式代数对易关系容差
QES_TOL = 1e-10  # 准精确可解溢出系数容差
OPERATOR_TOL = 1e-10  # 微分算子系数比较容差（相对最大系数）
ENERGY_CROSSCHECK_TOL = 1e-9  # 能量公式与 z^N 系数比值的相对偏差
REFINE_ENERGY_TOL = 1e-8  # Newton 精化前后能量变化上限
IMAG_TOL = 1e-9  # 能量虚部上限（相对尺度）
VERIFY_TOL = 1e-8  # Hψ = Eψ 校验（相对尺度）

# 迭代上限配置
JACOBI_MAX_SWEEPS = 50
ABERTH_MAX_ITER = 200
NEWTON_MAX_ITER = 50
NEWTON_MAX_HALVINGS = 40

# 预设模型默认参数
PRESET_DEFAULTS = {
    "bose_hubbard": {"g": 0.5, "g_prime": 1.0},
    "lmg": {"g": 0.3, "g_prime": 1.0},
    "rigid_rotor": {"a": 1.0, "b": 2.0, "c": 3.0},
    "tavis_cummings": {"w": 1.0, "g_prime": 1.0, "g": 0.1},
    "two_mode_tc": {"w1": 1.0, "w2": 1.5, "g_prime": 0.8, "g": 0.2},
}

# 预设测试网格（桌面规模）：自旋取值（2j）与玻色子截断
PRESET_GRIDS = {
    "bose_hubbard": {"two_j": list(range(1, 13)), "max_bosons": 0, "fock_cap": 0},
    "lmg": {"two_j": list(range(1, 13)), "max_bosons": 0, "fock_cap": 0},
    "rigid_rotor": {"two_j": list(range(1, 13)), "max_bosons": 0, "fock_cap": 0},
    "tavis_cummings": {"two_j": list(range(1, 13)), "max_bosons": 4, "fock_cap": 8},
    "two_mode_tc": {"two_j": [1, 2, 3], "max_bosons": 3, "fock_cap": 5},
}

# 随机耦合抽样配置
RANDOM_DRAWS = 10
COUPLING_RANGE = (0.1, 2.0)
MAX_SECTOR_SIZE = 12  # 参与比对的扇区维数上限 N ≤ 12

# 输出配置
DEFAULT_FORMAT = "json"
DEFAULT_MAX_BOSONS = 2
DEFAULT_SEED = 7
