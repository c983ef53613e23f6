"""Exception types shared across the package."""


class RelgaussError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(RelgaussError, ValueError):
    """Operands have incompatible shapes."""


class SingularFormError(RelgaussError, ValueError):
    """A form that must be invertible is degenerate."""


class IncompatibleStructureError(RelgaussError, ValueError):
    """Metric and symplectic form do not define a valid complex structure."""


class WidthMismatchError(RelgaussError, ValueError):
    """Overlap of packets with different widths requested without the
    explicit general-integral flag."""


class TruncationOverflowError(RelgaussError, ValueError):
    """Fock-space truncation too small for the requested operation."""


class StatisticsError(RelgaussError, ValueError):
    """Operation not defined for the given particle statistics."""


class PartitionTagError(RelgaussError, ValueError):
    """State or operator is in the wrong partition for this operation."""


class FieldRegionError(RelgaussError, ValueError):
    """A branch center lies outside the capacitor field region."""


class ProtocolNotApplicableError(RelgaussError, ValueError):
    """The extraction protocol cannot run (no entanglement to extract)."""


class MixedStateError(RelgaussError, ValueError):
    """A pure state was required."""


class NumericToleranceError(RelgaussError, RuntimeError):
    """An internal numeric consistency check breached its tolerance."""


class ScenarioValidationError(RelgaussError, ValueError):
    """Scenario document failed validation.

    Carries the full list of problems, not just the first one found.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
