# coding=utf-8


class GridError(Exception):
    def __init__(self, *args, **kwargs):
        self.reason = kwargs.get("reason")
        super(GridError, self).__init__(*args)


class InputError(GridError):
    """Problems with a scenario or sweep document. The CLI exits with 2."""

    pass


class AnalysisError(GridError):
    """A valid input that cannot be analysed or simulated. The CLI exits with 1."""

    pass


class ScenarioSyntaxError(InputError):
    pass


class ValidationError(InputError):
    def __init__(self, *args, **kwargs):
        self.field = kwargs.pop("field", None)
        super(ValidationError, self).__init__(*args, **kwargs)

    def with_prefix(self, prefix):
        """
        Re-anchor the error below a parent path,
        e.g. ``r_q`` raised by a branch becomes ``branch[1].r_q``.
        """
        field = prefix if not self.field else "{}.{}".format(prefix, self.field)
        message = str(self)
        if self.field and message.startswith(self.field):
            message = field + message[len(self.field) :]
        return ValidationError(message, field=field, reason=self.reason)


class ValidationWarning(UserWarning):
    pass


class WrongControllerKind(AnalysisError):
    pass


class UnsupportedController(AnalysisError):
    pass


class StepSizeUnderflow(AnalysisError):
    def __init__(self, *args, **kwargs):
        self.state = kwargs.pop("state", None)
        self.time = kwargs.pop("time", None)
        super(StepSizeUnderflow, self).__init__(*args, **kwargs)


class NonFiniteState(AnalysisError):
    pass


class NoEquilibrium(AnalysisError):
    pass


class DomainError(AnalysisError):
    pass


class NotTwiceDifferentiable(AnalysisError):
    pass


class SingularWeight(AnalysisError):
    pass


class DegenerateDenominator(AnalysisError):
    pass


class EmptySeries(AnalysisError):
    pass
