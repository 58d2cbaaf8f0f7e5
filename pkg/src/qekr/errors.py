"""Exception hierarchy shared by every module."""


class QekrError(Exception):
    pass


# field / linear algebra
class NotAPrimePower(QekrError, ValueError):
    pass


class UnsupportedOrder(QekrError, ValueError):
    pass


class InvalidEntry(QekrError, ValueError):
    pass


class AmbientMismatch(QekrError, ValueError):
    pass


# counting
class InvalidOrder(QekrError, ValueError):
    pass


class OrderViolation(QekrError, ValueError):
    pass


class DomainViolation(QekrError, ValueError):
    pass


class UnknownFormula(QekrError, KeyError):
    pass


# enumeration / cache
class BudgetExceeded(QekrError, RuntimeError):
    def __init__(self, what, count, budget):
        self.count = count
        self.budget = budget
        super().__init__(f"{what}: {count} exceeds budget {budget}")


class NotNested(QekrError, ValueError):
    pass


class CacheError(QekrError):
    pass


class IoFailure(CacheError, OSError):
    pass


class ChecksumMismatch(CacheError):
    pass


class VersionMismatch(CacheError):
    pass


# families / verification
class AnchorViolation(QekrError, ValueError):
    pass


class NoFormula(QekrError, LookupError):
    pass


class EmptyFamily(QekrError, ValueError):
    pass


class NotMaximal(QekrError):
    pass


class UnknownLemma(QekrError, KeyError):
    pass
