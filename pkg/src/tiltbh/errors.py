"""Exception types shared across the package."""


class CapacityError(ValueError):
    """A requested object exceeds a hard size limit (index width, dense cap)."""


class SolverError(RuntimeError):
    """An eigensolver failed to deliver the requested pairs.

    Attributes
    ----------
    n_converged : int
        Number of eigenpairs that did converge before the failure.
    """

    def __init__(self, message, n_converged=0):
        super().__init__(message)
        self.n_converged = n_converged


class IntegrityError(RuntimeError):
    """A cache or result file failed its checksum or format validation."""


class ParityMixingWarning(UserWarning):
    """Tilt strength is zero: the Hamiltonian regains parity symmetry.

    Pooled level statistics then mix the two parity sectors, which biases
    ratio statistics toward the integrable value. Use a small nonzero tilt
    if pure-sector statistics are intended.
    """
