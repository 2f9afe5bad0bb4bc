"""Exception and warning types shared across the package."""


class NumericalQualityWarning(UserWarning):
    """A result was computed but failed an internal accuracy check.

    The CLI promotes these to exit code 2 under ``--strict``.
    """


class ValidationError(ValueError):
    """Invalid user input (configs, model files, CLI arguments)."""
