"""Exception types shared across the package.

Each error carries the process exit code the command line tool uses for it.
"""


class PolyemError(Exception):
    exit_code = 1


class InputError(PolyemError, ValueError):
    """Malformed or unsupported input (parse errors, bad shapes, wrong dimensions)."""

    exit_code = 2


class GenericityError(PolyemError):
    """A complement map is not generic for a subspace the computation needs."""

    exit_code = 3


class SizeGuardError(PolyemError):
    """A brute-force enumeration would exceed the configured size limit."""

    exit_code = 4


class GenuinePoleError(PolyemError, ArithmeticError):
    """A function that was expected to be regular at the origin has a pole there."""

    exit_code = 1
