"""Exception types raised by the library.

Each error maps onto a CLI exit code through ``exit_code``.
"""


class PackingError(Exception):
    exit_code = 4


class InputError(PackingError, ValueError):
    exit_code = 2


class IndexBeyondExplicit(InputError, IndexError):
    pass


class EpsilonTooLarge(InputError):
    pass


class NonPositiveArgument(InputError):
    pass


class NTooLarge(InputError):
    pass


class InstanceTooLarge(InputError):
    pass


class DependentSystem(InputError):
    pass


class Indeterminate(PackingError, ArithmeticError):
    exit_code = 3


class SandwichNotClosed(Indeterminate):
    def __init__(self, max_depth, lower, upper):
        super().__init__(
            f"sandwich still open at depth {max_depth}: lower={lower}, upper={upper}"
        )
        self.max_depth = max_depth
        self.lower = lower
        self.upper = upper


class DepthCapExceeded(PackingError):
    exit_code = 2


class SeparationViolated(PackingError):
    pass


class CertificateInvalid(PackingError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row
