"""Exception hierarchy.

Everything raised on bad input derives from :class:`ColexGraphError`, so
callers (and the CLI) can separate data problems from bugs.
"""


class ColexGraphError(Exception):
    """Base class for all library errors."""


class ConfigError(ColexGraphError):
    """Invalid build configuration."""


class DataError(ColexGraphError):
    """Malformed or inconsistent input data.

    ``line`` is the 1-based line number of the offending row when the error
    comes from a file; ``path`` is the file.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        self.reason = message
        prefix = ""
        if path is not None:
            prefix = f"{path}:"
        if line is not None:
            prefix += f"{line}: "
        elif prefix:
            prefix += " "
        super().__init__(prefix + message)


# ingest
class MalformedRow(DataError):
    pass


class DuplicateId(DataError):
    pass


class CoordinateOutOfRange(DataError):
    pass


class MalformedForms(DataError):
    pass


class NegativeFrequency(DataError):
    pass


class SelfColexification(DataError):
    pass


class RatingOutOfScale(DataError):
    def __init__(self, message, line=None, path=None, problems=()):
        self.problems = tuple(problems)
        super().__init__(message, line=line, path=path)


class AsymmetricMatrix(DataError):
    pass


class ValueOutOfRange(DataError):
    pass


# concepts
class UnknownSetName(ColexGraphError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class EmptyResult(ColexGraphError):
    pass


# colex
class EmptyPatternList(ColexGraphError):
    pass


class UnknownLanguageId(DataError):
    pass


class ZeroVector(ColexGraphError):
    pass


# phon
class EmptyTranscription(DataError):
    pass


class InsufficientOverlap(ColexGraphError):
    pass


# geo
class MissingCoordinates(ColexGraphError):
    pass


# graph
class MissingPath(ColexGraphError):
    pass


class ConflictingAttribute(DataError):
    def __init__(self, attribute, message):
        self.attribute = attribute
        super().__init__(message)


class IoFailure(ColexGraphError):
    pass


# stats
class DegenerateSeries(ColexGraphError):
    pass


class LengthMismatch(ColexGraphError):
    pass


class UnknownAttribute(ColexGraphError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class RankDeficient(ColexGraphError):
    pass


class EmptyGroup(ColexGraphError):
    pass


class SampleTooLarge(ColexGraphError):
    pass


class NodeSetMismatch(ColexGraphError):
    pass


class InsufficientLanguages(ColexGraphError):
    pass


class UnknownAnalysis(ConfigError):
    pass
