"""Error taxonomy shared by all modules.

Exit-code mapping used by the CLI: InputError -> 2, ResourceError -> 3.
InvariantError signals a broken internal guarantee (a bug or corrupted
input data) and is never mapped to a clean exit code.
"""


class InputError(ValueError):
    """Malformed or inconsistent user input (bad regex, alphabet mismatch...)."""


class ResourceError(RuntimeError):
    """A documented desk-scale bound was exceeded."""


class InvariantError(RuntimeError):
    """An internal invariant failed; indicates a bug or corrupted data."""
