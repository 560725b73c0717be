"""Package exception hierarchy."""


class ScmError(Exception):
    """Base class for all scmfpga errors."""


class DataError(ScmError):
    """Bad input data: CSV parse failures, missing columns, shape mismatches."""


class ModelFormatError(DataError):
    """Model file cannot be read: bad magic, version, or CRC."""


class TrainingFailedError(ScmError):
    """Constructive training could not add a single node to the first layer."""
