# License: BSD 3 clause


class ProxSeqError(Exception):
    """Base class of the errors raised by ProxSeq."""


class InputError(ProxSeqError, ValueError):
    """Invalid family/order specification or violated precondition."""


class OutOfReach(InputError):
    """Index or argument beyond what an evaluator can represent exactly."""


class SolverError(ProxSeqError, RuntimeError):
    """
    A root or golden-section solve did not converge.

    Parameters
    ==========

    message : str
        What failed.

    bracket : tuple
        The last bracket (lo, hi) of the solver.

    iterations : int
        Number of iterations done before giving up.

    """
    def __init__(self, message, bracket=None, iterations=None):
        super(SolverError, self).__init__(message)
        self.bracket = bracket
        self.iterations = iterations

    def __str__(self):
        msg = super(SolverError, self).__str__()
        if self.bracket is not None:
            msg += f' (bracket={self.bracket}, iterations={self.iterations})'
        return msg
