"""Centralised numerical tolerances.

Every default threshold used across the package lives here so that callers
can inspect or override them in one place.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # cxmat
    unitary: float = 1e-12
    svd_offdiag: float = 5e-16  # scaled by row length
    svd_max_sweeps: int = 80
    # rpoly
    degeneracy: float = 1e-12
    root_residual: float = 1e-10
    # slices
    cluster_radius: float = 1e-6
    singular_grad: float = 1e-8
    genericity_eps: float = 1e-6
    backsub_residual: float = 1e-7
    membership: float = 1e-9
    orthogonality: float = 1e-8
    # chambers
    chamber_eps: float = 1e-3
    # lift
    rank_threshold: float = 1e-10
    close_spectrum: float = 1e-6
    degenerate_spectrum: float = 1e-10
    # verify
    frame_rank: float = 1e-9
    residual_guard: float = 1e-300
    newton_starts: int = 200
    newton_max_iter: int = 100


DEFAULT = Tolerances()
