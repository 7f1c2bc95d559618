"""Exception types shared across the toolkit.

Every error raised on bad data subclasses :class:`AugkitError`, so callers
(and the HTTP service) can map the whole family to a single failure mode
while still reporting the precise error name.
"""


class AugkitError(Exception):
    """Base class for all toolkit errors."""


# dataset / file errors
class IoError(AugkitError):
    """A file could not be read or written."""


class MalformedRow(AugkitError):
    """A line of an input file violates its format."""


class DuplicateId(AugkitError):
    """Two records in one dataset share an id."""


class TabInText(AugkitError):
    """A record cannot be written to TSV without losing data."""


class MissingLabel(AugkitError):
    """A pre-tagged sentence block has no label comment."""


# embedding errors
class HeaderMismatch(AugkitError):
    """Declared vocabulary size or dimension disagrees with file content."""


class NonFiniteValue(AugkitError):
    """An embedding component is NaN or infinite."""


class DuplicateWord(AugkitError):
    """The same word appears twice in an embedding file."""


class ZeroVector(AugkitError):
    """A vector has zero norm and cannot be unit-normalized."""


class OutOfVocabulary(AugkitError):
    """A queried word is not in the embedding vocabulary."""


class EmptyEmbedding(AugkitError):
    """No token of a sentence is covered by the embedding vocabulary."""


# augmentation errors
class NoMatchingToken(AugkitError):
    """No token in the sentence carries the requested tag."""


class NoCandidate(AugkitError):
    """Every replacement candidate was filtered out."""


# classifier / evaluation errors
class SingleClass(AugkitError):
    """Training data contains fewer than two classes."""


class DimensionMismatch(AugkitError):
    """Feature dimensionality does not match the model."""


class LengthMismatch(AugkitError):
    """Two parallel sequences differ in length."""


class EmptyDataset(AugkitError):
    """An operation requires at least one record."""


# service errors
class UnknownHandle(AugkitError):
    """No loaded resource handle matches the given id."""
