"""Exception types shared across the package.

The CLI maps :class:`InputError` to exit code 1 and :class:`InvariantError`
to exit code 2.
"""


class InputError(ValueError):
    """Bad user input: unknown junction, malformed file, oversized instance."""


class InvariantError(RuntimeError):
    """An internal consistency check failed; indicates a bug, not bad input."""
