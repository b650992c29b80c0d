class DimensionMismatchError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


class NotDensityError(ValueError):
    pass


class ConvergenceError(ArithmeticError):
    pass


class ChannelSchemaError(ValueError):
    """Raised when a channel file or channel construction is malformed. The message names the field or the
    input tuple at fault."""
    pass


class BudgetError(ValueError):
    """Raised when an operator on d^n dimensions would exceed the materialization budget."""
    pass


class PreconditionError(ValueError):
    def __init__(self, message, report=None):
        """Raised when a capacity theorem is applied to a channel outside its interference condition.
        report is the ConditionReport that failed."""
        ValueError.__init__(self, message)
        self.report = report


class PropertyFailure(AssertionError):
    def __init__(self, message, instance=None):
        AssertionError.__init__(self, message)
        self.instance = instance
