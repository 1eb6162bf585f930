"""Exception types shared across the package.

The command-line front end maps these onto distinct process exit codes,
so library code should raise the most specific type that applies:

* invalid arguments / malformed configuration -> ``ConfigError`` (or a plain
  ``ValueError`` from a constructor, which the CLI treats the same way),
* unreadable or inconsistent data files -> ``InputDataError``,
* failed numerical factorizations or broken internal cross-checks ->
  ``NumericalError``.
"""


class ConfigError(ValueError):
    """A scenario configuration is malformed or self-inconsistent."""


class InputDataError(ValueError):
    """An input data file is missing, unparsable, or inconsistent."""


class NumericalError(RuntimeError):
    """A numerical routine failed or an internal cross-check broke."""
