"""Exception types shared across the package.

Every exception carries an ``exit_code`` used by the CLI: 1 for validation
problems (bad arguments, malformed configs, contract violations), 2 for I/O
and file-format problems.
"""


class LongDiffError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ValidationError(LongDiffError):
    """An argument, config, or intermediate value violates a contract."""

    exit_code = 1


class TensorFormatError(LongDiffError):
    """A tensor file is corrupt or does not follow the LDT1 layout."""

    exit_code = 2
    code = "corrupt"


class BadMagicError(TensorFormatError):
    code = "bad_magic"


class TruncatedPayloadError(TensorFormatError):
    code = "truncated"


class NonFinitePayloadError(TensorFormatError):
    code = "non_finite"
