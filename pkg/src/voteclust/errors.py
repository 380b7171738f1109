"""Exceptions shared across the package."""


class VoteclustError(Exception):
    """Base class for all package errors."""


class DataError(VoteclustError):
    """Malformed or inconsistent input data (bad file, unknown id, bad token)."""


class InsufficientDocuments(VoteclustError):
    """A filter or dataset left fewer than 2 documents, so no network can be built."""
