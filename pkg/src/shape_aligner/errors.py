"""Exception and warning types.

Every error carries a ``category`` string used by the CLI for its single-line
JSON error report, and an ``exit_code``. Validation errors (bad inputs caught
before any work is done) exit with 2, runtime errors with 3.
"""


class IsaError(Exception):
    category = "error"
    exit_code = 3


class ValidationError(IsaError):
    category = "validation"
    exit_code = 2


class DimensionMismatch(ValidationError):
    category = "dimension_mismatch"


class LengthMismatch(ValidationError):
    category = "length_mismatch"


class SchemaError(ValidationError):
    category = "schema"

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class MissingAsset(ValidationError):
    category = "missing_asset"


class SpecInvalid(ValidationError):
    category = "spec_invalid"


class CodecError(ValidationError):
    category = "codec"


class BadMagic(CodecError):
    category = "bad_magic"


class BadHeader(CodecError):
    category = "bad_header"


class TruncatedFile(CodecError):
    category = "truncated_file"


class NonFiniteValue(CodecError):
    category = "non_finite_value"


class UnsupportedBitDepth(CodecError):
    category = "unsupported_bit_depth"


class NoBoundary(IsaError):
    """A fill component has no known neighbour to take boundary values from."""

    category = "no_boundary"


class NonConvergence(IsaError):
    """Raised only when non-convergence is escalated (``--strict``)."""

    category = "non_convergence"
    exit_code = 4


class IsaWarning(UserWarning):
    pass


class EmptySourceMaskWarning(IsaWarning):
    pass


class NonConvergenceWarning(IsaWarning):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ShapeDriftWarning(IsaWarning):
    pass
