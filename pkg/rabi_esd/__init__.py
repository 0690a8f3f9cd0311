"""
rabi-esd: 两个独立 Jaynes-Cummings 原子（不做旋波近似）纠缠演化的数值精确模拟器

Exact atom-atom entanglement dynamics, beyond the rotating-wave approximation.
"""

__version__ = "0.1.0"
__author__ = "rabi-esd Team"
