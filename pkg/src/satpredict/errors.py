"""Exception types shared across the toolkit.

Every error raised on bad input derives from :class:`SatPredictError`, which is
itself a ``ValueError`` so callers that only care about "bad data" can catch the
builtin.
"""


class SatPredictError(ValueError):
    pass


# trace ingest

class MalformedLine(SatPredictError):
    def __init__(self, line_no, line="", reason=""):
        self.line_no = line_no
        self.line = line
        self.reason = reason
        msg = f"line {line_no}: malformed stats line"
        if reason:
            msg += f" ({reason})"
        if line:
            msg += f": {line!r}"
        super().__init__(msg)


class MissingField(SatPredictError):
    def __init__(self, iteration, field):
        self.iteration = iteration
        self.field = field
        super().__init__(f"iteration {iteration}: missing field {field!r}")


class NonConsecutiveIteration(SatPredictError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"expected iteration {expected}, got {got}")


class InvalidRecord(SatPredictError):
    def __init__(self, field, value):
        self.field = field
        self.value = value
        super().__init__(f"invalid value for {field}: {value!r}")


class HeaderMismatch(SatPredictError):
    pass


class RowArity(SatPredictError):
    def __init__(self, line_no, expected=None, got=None):
        self.line_no = line_no
        msg = f"line {line_no}: wrong number of columns"
        if expected is not None:
            msg += f" (expected {expected}, got {got})"
        super().__init__(msg)


class UnknownAdapter(SatPredictError):
    pass


# cnf

class NoHeader(SatPredictError):
    pass


class LiteralOutOfRange(SatPredictError):
    def __init__(self, literal):
        self.literal = literal
        super().__init__(f"literal {literal} out of range")


class ClauseCountMismatch(SatPredictError):
    def __init__(self, declared, found):
        self.declared = declared
        self.found = found
        super().__init__(f"header declares {declared} clauses, found {found}")


class EmptyClause(SatPredictError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"clause {index} is empty")


class EmptyInput(SatPredictError):
    pass


# features / dataset

class InsufficientIterations(SatPredictError):
    def __init__(self, have, need):
        self.have = have
        self.need = need
        super().__init__(f"trace has {have} iterations, need {need}")


class LengthMismatch(SatPredictError):
    pass


class RunStillInProgress(SatPredictError):
    pass


class MissingRuntime(SatPredictError):
    pass


class OneClassOnly(SatPredictError):
    pass


class DegenerateSplit(SatPredictError):
    pass


class EmptyDataset(SatPredictError):
    pass


# nn

class BadDropout(SatPredictError):
    def __init__(self, p):
        self.p = p
        super().__init__(f"dropout rate must lie in [0, 1), got {p}")


class DimensionMismatch(SatPredictError):
    pass


class SpecMismatch(SatPredictError):
    pass


class SchemaVersionMismatch(SatPredictError):
    pass


class CorruptModel(SatPredictError):
    pass


class BadConfig(SatPredictError):
    pass


# synth / plot

class BadParams(SatPredictError):
    pass


class UnknownParameter(SatPredictError):
    pass


class IterationOutOfRange(SatPredictError):
    pass
