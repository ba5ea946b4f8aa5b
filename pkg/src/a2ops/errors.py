"""Exception hierarchy shared by every module."""


class A2OpsError(Exception):
    pass


class TableMismatchError(A2OpsError):
    """Operands were built over different generator tables."""


class SingularPointError(A2OpsError):
    """Evaluation point lies inside the guard radius of a singularity."""


class DomainError(A2OpsError, ValueError):
    pass


class ConstraintError(A2OpsError, ValueError):
    """A linear constraint such as lambda_1 + lambda_2 + lambda_3 = 0 is violated."""


class SamplingError(A2OpsError):
    """No admissible sample survived the singular-set filter."""


class UnknownOperatorError(A2OpsError, KeyError):
    pass
