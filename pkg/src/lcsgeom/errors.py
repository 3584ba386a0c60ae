"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so library code should raise the most
specific class that applies instead of bare ValueError.
"""


class LcsgeomError(Exception):
    """Base class for all library errors."""


class ConfigError(LcsgeomError):
    """Invalid configuration object (alphabet, property spec, experiment config)."""


class UsageError(LcsgeomError):
    """Operation called with arguments outside its documented domain."""


class ResourceError(LcsgeomError):
    """A configured resource cap (enumeration size, memory budget) was exceeded."""
