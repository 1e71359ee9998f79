"""Exception classes shared across the package."""


class OidetError(Exception):
    """Base class for all oidet errors."""


class DimensionMismatch(OidetError, ValueError):
    """Vector/matrix dimensions do not agree."""


class AllZeroNorms(OidetError, ValueError):
    """Every (centered) sample has norm zero; shells cannot be built."""


class EmptyPool(OidetError, ValueError):
    """A sample pool required to be non-empty was empty."""


class EmptyInput(OidetError, ValueError):
    """A score list required to be non-empty was empty."""


class ZeroVariance(OidetError, ValueError):
    """Pooled standard deviation is zero with unequal means."""


class NotNormalized(OidetError, ValueError):
    """A density does not integrate to one within tolerance."""


class RangeError(OidetError, ValueError):
    """A probability-like argument fell outside its valid range."""


class BadSpec(OidetError, ValueError):
    """Malformed synthetic-distribution specification."""


class ParseError(OidetError, ValueError):
    """A data file could not be parsed."""


class RaggedRows(ParseError):
    """CSV rows have inconsistent column counts."""


class BadMagic(ParseError):
    """Binary matrix file does not start with the expected magic bytes."""


class SchemaVersionMismatch(OidetError, ValueError):
    """Persisted document carries an unsupported schema version."""
