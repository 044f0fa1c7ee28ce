"""Exception hierarchy. CLI exit codes hang off the class."""


class HamsimError(Exception):
    exit_code = 1


class ShapeError(HamsimError, ValueError):
    pass


class ContractError(HamsimError, ValueError):
    pass


class CapacityError(HamsimError):
    exit_code = 2


class ConvergenceError(HamsimError):
    exit_code = 3


class FileFormatError(HamsimError, ValueError):
    exit_code = 4


class NormalizationError(ContractError):
    pass


class NotQubitizedError(ContractError):
    pass


class DomainError(HamsimError, ValueError):
    pass
