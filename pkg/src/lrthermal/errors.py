"""Exception hierarchy.

Validation problems (bad geometry, bad partitions, capacity limits) derive
from :class:`ValidationError`; numerical failures from :class:`NumericalError`.
The CLI maps the two families to exit codes 2 and 3.
"""


class LrThermalError(Exception):
    pass


class ValidationError(LrThermalError, ValueError):
    pass


class GeometryError(ValidationError):
    pass


class PartitionError(ValidationError):
    pass


class CapacityError(ValidationError):
    pass


class NumericalError(LrThermalError, ArithmeticError):
    pass


class SingularStateError(NumericalError):
    pass


class BranchCutError(NumericalError):
    pass
