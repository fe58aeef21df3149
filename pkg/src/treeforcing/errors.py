"""Exception hierarchy shared by every module of the package."""


class ForcingError(Exception):
    """Base class for all library errors."""


class IllFormed(ForcingError):
    pass


class NotInTree(IllFormed):
    pass


class ParseError(ForcingError):
    def __init__(self, message, pos=None):
        self.pos = pos
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


class StemDepthExceeded(ForcingError):
    pass


class SystemUnavailable(ForcingError):
    pass


class ChainStalled(SystemUnavailable):
    pass


class NotMember(ForcingError):
    pass


class HeightZero(ForcingError):
    pass


class SeqMismatch(ForcingError):
    pass


class LengthMismatch(ForcingError):
    pass


class RefinerContract(ForcingError):
    pass


class ScheduleMissing(ForcingError):
    pass


class HorizonExceeded(ForcingError):
    pass


class NotUForm(ForcingError):
    pass


class ConditionOneFails(ForcingError):
    pass


class StepConflict(ForcingError):
    pass


class OracleFailure(ForcingError):
    pass


class NotMet(ForcingError):
    pass


class StageOrder(ForcingError):
    pass


class StageBudget(ForcingError):
    pass


class ConfigError(ForcingError):
    pass
