"""
usdembed Exceptions
"""


class USDError(Exception):
    """
    The base class for all usdembed exceptions.
    """


class ValidationError(USDError, ValueError):
    """
    An input does not satisfy the contract of the operation it was given to.
    """


class NotDiscriminableError(ValidationError):
    """
    The states are (numerically) linearly dependent and cannot be
    discriminated unambiguously.
    """


class ProblemFileError(ValidationError):
    """
    A problem or scenario file could not be parsed.

    Parameters
    ----------
    msg : str
        The human readable message.
    location : str, optional
        ``line L column C`` for syntax errors or a dotted field path.
    """
    def __init__(self, msg: str, location: str = None):
        self.location = location
        if location is not None:
            msg = f'{location}: {msg}'
        super().__init__(msg)


class SettingsError(USDError):
    """
    The user settings or the ``USD_EMBED_TOL`` override could not be read.
    """


class InfeasibleProbabilitiesError(USDError):
    """
    The requested conclusive probabilities need an operator with norm above one.
    """


class PassivityError(USDError):
    """
    A lossy operator is not a contraction.
    """


class DegenerateDesignError(USDError):
    """
    A pulse cannot be designed for orthogonal or identical states.
    """


class ConvergenceError(USDError):
    """
    A discretized propagation did not converge.

    Parameters
    ----------
    msg : str
        The human readable message.
    suggested_steps : int
        A step count that is expected to converge.
    """
    def __init__(self, msg: str, suggested_steps: int):
        self.suggested_steps = suggested_steps
        super().__init__(f'{msg} Try n_steps={suggested_steps}.')


class VerificationError(USDError):
    """
    A verification failed.

    Parameters
    ----------
    msg : str
        The human readable message.
    report : object, optional
        The report that failed.
    """
    def __init__(self, msg: str, report=None):
        self.report = report
        super().__init__(msg)


class ScheduleMismatchError(VerificationError):
    """
    A Hamiltonian schedule does not realize the target system block.
    """


class EmbeddingMismatchError(VerificationError):
    """
    A unitary does not embed the lossy operator it was compared to.
    """


class USDWarning(UserWarning):
    """
    The base class for all usdembed warnings.
    """


class RWAWarning(USDWarning):
    """
    The full Hamiltonian departs from its rotating wave approximation.
    """
