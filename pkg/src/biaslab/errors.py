"""Exception types shared by every module.

Each maps onto a CLI exit code (see :mod:`biaslab.cli`).
"""
import os


class BiasLabError(Exception):
    exit_code = 1


class InvalidArgument(BiasLabError, ValueError):
    exit_code = 2


class OutOfRange(BiasLabError, ValueError):
    exit_code = 2


class BudgetExceeded(BiasLabError, MemoryError):
    exit_code = 3


class Unsupported(BiasLabError, NotImplementedError):
    exit_code = 2


class CertificateError(BiasLabError, ArithmeticError):
    """A numerical certificate (tail bound, root classification, identity check) failed."""

    exit_code = 4


class SingularLocalFactor(CertificateError):
    pass


class RootFindingError(CertificateError):
    pass


DEFAULT_BUDGET_MB = 4096


def budget_bytes() -> int:
    """Memory cap for sieve and polynomial tables, from ``BIASLAB_BUDGET_MB``."""
    raw = os.environ.get("BIASLAB_BUDGET_MB")
    mb = DEFAULT_BUDGET_MB if raw is None else int(raw)
    return mb * 1024 * 1024


def check_budget(nbytes: int, what: str) -> None:
    cap = budget_bytes()
    if nbytes > cap:
        raise BudgetExceeded(
            f"{what} needs ~{nbytes / 2**20:.0f} MB, budget is {cap / 2**20:.0f} MB "
            "(raise BIASLAB_BUDGET_MB)"
        )
