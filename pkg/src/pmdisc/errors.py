"""Exception hierarchy shared by all pmdisc modules."""


class PmdiscError(Exception):
    """Base class for all errors raised by this package."""


# -- linear algebra ----------------------------------------------------------

class NonHermitianInput(PmdiscError):
    """Matrix violates the Hermiticity tolerance (or contains NaN/Inf)."""


class ConvergenceFailure(PmdiscError):
    """An iterative routine stalled before reaching its tolerance.

    For the SDP solver, ``last_dual`` carries the last feasible dual value,
    which remains a valid upper bound on the optimum.
    """

    def __init__(self, message, last_dual=None):
        super().__init__(message)
        self.last_dual = last_dual


class DimensionMismatch(PmdiscError):
    """Operands have incompatible dimensions."""


class NotPsd(PmdiscError):
    """Matrix has an eigenvalue below the negative tolerance."""


# -- ensembles ---------------------------------------------------------------

class InvalidState(PmdiscError):
    """A state is not PSD or does not have unit trace."""


class InvalidDistribution(PmdiscError):
    """Probabilities are negative or do not sum to one."""


class MissingPair(PmdiscError):
    """Some (string, encoding) pair has no state/probability."""


class NotProductUniform(PmdiscError):
    """Operation requires p_xb = p_b / N (uniform, independent strings)."""


class NotBinary(PmdiscError):
    """Operation requires a two-string ensemble (N = 2)."""


# -- SDP ---------------------------------------------------------------------

class TooManyAnswerVectors(PmdiscError):
    """N^L exceeds the enumeration cap."""


class IncompatiblePovm(PmdiscError):
    """POVM index set or operator dimension does not match the ensemble."""


# -- bounds / clifford -------------------------------------------------------

class CapExceeded(PmdiscError):
    """Enumeration cap exceeded (partitions or partition representatives)."""


class AlphaOutOfRange(PmdiscError):
    """The power-bound exponent must satisfy alpha > 1."""


class DimensionCap(PmdiscError):
    """Requested qubit count outside the supported range."""


# -- games -------------------------------------------------------------------

class NotClassical(PmdiscError):
    """Ensemble states do not all commute."""


class WrongShape(PmdiscError):
    """Ensemble does not match the required N/L/distribution/support shape."""


class BudgetExceeded(PmdiscError):
    """Strategy enumeration budget exceeded."""


# -- oracles -----------------------------------------------------------------

class WrongDimension(PmdiscError):
    """Oracle only supports a specific Hilbert-space dimension."""


class NotUnitVectors(UserWarning):
    """Bloch-criterion inputs are not unit vectors; pure-state reading invalid."""
