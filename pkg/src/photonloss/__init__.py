"""Exact simulation of photon-loss codes under passive linear optics."""

from .codes import (
    CodePair,
    VerificationReport,
    builtin_code,
    transform_code,
    transformed_g,
    verify_code,
)
from .fock import FockBasis, StateVector, annihilate, create, enumerate_basis, inner
from .linopt import (
    FockOperator,
    HermitianGenerator,
    ModeUnitary,
    builtin_unitary,
    lift_generator,
    lift_unitary,
    lift_unitary_via_exp,
    permanent,
)
from .logic import (
    BlochPoint,
    GroupClosure,
    LogicalGate,
    bloch,
    extract_gate,
    group_closure,
    leakage_norm,
    obstruction_check,
    phase_theorem_check,
)
from .loss import (
    FidelityCurve,
    LossChannel,
    RecoveryMap,
    build_channel,
    build_recovery,
    fidelity_curve,
    logical_channel,
)

__version__ = "0.1.0"
