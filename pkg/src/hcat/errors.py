"""Exception hierarchy shared across the package."""


class HcatError(Exception):
    """Base class for all package errors."""


class ConfigError(HcatError):
    """Invalid or incomplete run configuration."""


class DataError(HcatError):
    """Input data violates a documented contract."""


class SchemaError(DataError):
    """Feature vector or model dimensions do not match the declared schema."""
