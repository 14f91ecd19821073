"""Finite-determinant KP tau functions from Jordan-form data."""

from .config import BuiltModel, FamilyConfig, build_model
from .errors import (
    BackendUnsupported,
    BoxError,
    ConfigError,
    DegenerateK,
    DegenerateVandermonde,
    EigenvalueCollision,
    KPTauError,
    RankError,
    ShapeError,
    ShiftDomainError,
    SingularAtOrigin,
    ZeroTau,
)
from .families import (
    CalogeroMoserFamily,
    SolitonFamily,
    calogero_moser_family,
    cauchy_family,
    generic_jordan_family,
    is_regular_soliton,
    rational_family,
    soliton_family,
)
from .hirota import hg_factorization, kp_bilinear_residual_fd, kp_convergence, plucker_relation_residual, xi_matrix
from .linalg import EXACT, FLOAT, MP, GaussianFraction, JordanSpec
from .rankone import RankOneSystem, build_A, build_A0, build_A_shift, build_K, lemma_identities, verify_rank_one
from .schur import Partition, frobenius, partitions_up_to, schur_eval, schur_expansion
from .tau import TauModel, baker_akhiezer, miwa_shift_tau, tau_general, tau_geometric, tau_gk, tau_W_BCD

__version__ = "0.1.0"
