"""Exceptions shared across modules."""


class MemoLimitError(RuntimeError):
    """A memo table exceeded its configured entry cap.

    ``entries`` is the count at the moment of failure. Callers that can
    degrade gracefully (quotient search) catch this and report an
    undetermined result; direct evaluation surfaces it as a resource error.
    """

    def __init__(self, entries: int):
        super().__init__(f"memo limit exceeded ({entries} entries)")
        self.entries = entries


class EngineWidthError(RuntimeError):
    """The compiled engine cannot pack this context's coordinates into its
    fixed-width keys; the pure engine has no such limit."""


class InternalInconsistencyError(AssertionError):
    """A certified result was contradicted later; indicates a bug, never a
    routine failure."""
