"""Exception types raised by the library."""


class SchifferOpsError(Exception):
    """Base class for all library errors."""


# -- geometry ---------------------------------------------------------------

class NonUnivalent(SchifferOpsError):
    """Curve data fails the univalence screen."""


class IterationDiverged(SchifferOpsError):
    """Boundary-correspondence iteration failed to reach tolerance."""


class InverseMapDiverged(SchifferOpsError):
    """Newton inversion of a conformal map did not converge."""


class CoincidentPoints(SchifferOpsError):
    """Kernel or Green's function evaluated at coincident singular points."""


class NotSimplyConnected(SchifferOpsError):
    """Operation requires a simply connected component."""


class EpsilonTooLarge(SchifferOpsError):
    """Level value leaves the collar where the chart is valid."""


class NonMonotone(SchifferOpsError):
    """Sampled circle correspondence is not a monotone degree-1 map."""


# -- forms ------------------------------------------------------------------

class ComponentMismatch(SchifferOpsError):
    """Operands live on different components."""


class CycleOutsideComponent(SchifferOpsError):
    """Integration cycle leaves the component."""


class SingularGram(SchifferOpsError):
    """Gram matrix is numerically singular."""


# -- operators --------------------------------------------------------------

class QuadratureOverflow(SchifferOpsError):
    """Non-finite values encountered during operator assembly."""


class CalibrationError(SchifferOpsError):
    """Kernel sign calibration against the reproducing oracle failed."""


# -- jump -------------------------------------------------------------------

class QNearCurve(SchifferOpsError):
    """Jump base point too close to the separating curve."""


class ExtrapolationUnstable(SchifferOpsError):
    """Level-curve extrapolation diagnostics are inconsistent."""


class WeldingUnavailable(SchifferOpsError):
    """Transmission requested on a model without a welding (genus 1)."""


class NotExact(SchifferOpsError):
    """One-form has nonvanishing periods."""


class NotAdmissible(SchifferOpsError):
    """Harmonic function violates the admissibility constraints."""


# -- cli --------------------------------------------------------------------

class ConfigInvalid(SchifferOpsError):
    """Experiment configuration failed validation."""


class SuiteFailed(SchifferOpsError):
    """One or more suite checks exceeded tolerance."""
