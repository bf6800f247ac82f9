"""Schiffer comparison operators and the Plemelj-Sokhotski jump on
sphere and torus models separated by a Jordan curve."""

from .errors import (
    CalibrationError,
    CoincidentPoints,
    ComponentMismatch,
    ConfigInvalid,
    CycleOutsideComponent,
    EpsilonTooLarge,
    ExtrapolationUnstable,
    IterationDiverged,
    InverseMapDiverged,
    NonMonotone,
    NonUnivalent,
    NotAdmissible,
    NotExact,
    NotSimplyConnected,
    QNearCurve,
    QuadratureOverflow,
    SchifferOpsError,
    SingularGram,
    SuiteFailed,
    WeldingUnavailable,
)
from .geometry import (
    CurveSpec,
    SampledCurve,
    SurfaceModel,
    build_model,
    dw_green_R,
    green_R,
    green_component,
    green_component_derivs,
    level_curve,
    welding,
)
from .forms import (
    CoefficientForm,
    GridForm,
    HarmonicFun,
    check_W1,
    dbar_solve,
    inner_product,
    norm2,
    periods,
    project_V1,
)
from .kernels import K_R, K_comp, KernelValue, L_R, L_comp, L_regularized, calibrate
from .schiffer import (
    OperatorMatrix,
    adjoint,
    assemble_S,
    assemble_T,
    grunsky_norm,
    verify_adjoint_identity,
    verify_complete_identity,
)
from .jump import (
    JumpResult,
    jump,
    plemelj_solve,
    transmit,
    transmit_exact,
    verify_jump_derivatives,
    verify_reflection,
    verify_side_independence,
)
from .report import CheckRecord, Report

__version__ = "0.1.0"
