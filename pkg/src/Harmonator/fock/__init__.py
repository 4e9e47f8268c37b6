"""Exact propagation of the atom with one or two truncated modes."""  # noqa: N999

from .hamiltonian import FockHamiltonian
from .solver import FockHistory, evolve
from .state import FockState
from .statistics import (
    AuditReport,
    G2Value,
    MandelSummary,
    PhotonStatistics,
    cross_term_audit,
    g2_equal_time,
    mandel_summary,
    photon_statistics,
)

__all__ = [
    "AuditReport",
    "FockHamiltonian",
    "FockHistory",
    "FockState",
    "G2Value",
    "MandelSummary",
    "PhotonStatistics",
    "cross_term_audit",
    "evolve",
    "g2_equal_time",
    "mandel_summary",
    "photon_statistics",
]
