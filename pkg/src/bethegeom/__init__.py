"""Numerical checks linking the XXZ Bethe algebra, K-theoretic vertex functions,
QQ-systems with their opers, and trigonometric Ruijsenaars-Schneider duality."""

from .spinchain import ChainSpec, transfer, bethe_vector, q_operator
from .bethe import BetheInstance, HomotopyConfig, solve_all, perturbative_roots
from .vertex import FixedPoint, eigenvalue_limit, vertex_series
from .qq import CartanData, QQInstance, solve_qminus, miura_connection
from .wronskian import WronskianData, extract_vk, trs_from_sections

__all__ = [
    "ChainSpec", "transfer", "bethe_vector", "q_operator",
    "BetheInstance", "HomotopyConfig", "solve_all", "perturbative_roots",
    "FixedPoint", "eigenvalue_limit", "vertex_series",
    "CartanData", "QQInstance", "solve_qminus", "miura_connection",
    "WronskianData", "extract_vk", "trs_from_sections",
]
