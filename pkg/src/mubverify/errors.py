"""Exception hierarchy shared by all modules."""


class MubVerifyError(Exception):
    """Base class for every error raised by the package."""


class DomainError(MubVerifyError, ValueError):
    pass


class DimensionMismatch(MubVerifyError, ValueError):
    pass


class NotHermitian(MubVerifyError, ValueError):
    pass


class UnsupportedDimension(MubVerifyError, ValueError):
    pass


class ZeroState(MubVerifyError, ValueError):
    pass


class NotAchievable(MubVerifyError):
    """The requested confidence cannot be reached from the observed record."""


class NonConvergence(MubVerifyError, RuntimeError):
    pass


class DegenerateFit(MubVerifyError):
    pass


class GridMismatch(MubVerifyError, ValueError):
    pass


class ConfigError(MubVerifyError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class LedgerFormatError(MubVerifyError, ValueError):
    def __init__(self, path, row, message):
        super().__init__(f"{path}: row {row}: {message}")
        self.path = path
        self.row = row
