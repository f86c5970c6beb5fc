"""
Exceptions raised by the junction toolkit
"""
import numpy as np


class JunctionError(Exception):
    """Base class for every error raised by this package"""


class DomainError(JunctionError, ValueError):
    """Parameters or arguments outside their admissible range"""


class RangeError(DomainError):
    """Argument outside the documented validity range of a special function"""


class ConstraintViolation(JunctionError):
    """A transformation was applied to a solution outside its subclass"""


class ConsistencyError(JunctionError):
    """Interface or boundary data that cannot come from the model"""


class PreconditionFailed(JunctionError):
    pass


class SingularEvaluation(JunctionError):
    """A solution was evaluated at (or next to) a movable pole"""

    def __init__(self, points, message=None):
        self.points = np.atleast_1d(np.asarray(points, dtype=float))
        if message is None:
            shown = ', '.join(f'{p:.6g}' for p in self.points[:5])
            more = '' if self.points.size <= 5 else f' (+{self.points.size - 5} more)'
            message = f'singular evaluation at x = {shown}{more}'
        super().__init__(message)


class IdenticallyZeroField(JunctionError):
    """E vanishes identically; the inverse Gambier map needs the Airy seed instead"""


class PoleOnInterval(JunctionError):
    def __init__(self, x_zero):
        self.x_zero = float(x_zero)
        super().__init__(f'F vanishes at x = {self.x_zero:.12g}; the Airy seed has a pole on [0, 1]')


class AllSingular(JunctionError):
    """No point of a scan grid could be evaluated"""


class NonConvergence(JunctionError):
    def __init__(self, message, diagnostics=None, last_iterate=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
        self.last_iterate = last_iterate


class SingularJacobian(NonConvergence):
    pass
