class ProcgenError(Exception):
    """Base class for engine errors."""


class StaleHandleError(ProcgenError):
    """A vertex/face handle no longer refers to a live element."""


class BoundaryError(ProcgenError):
    """Navigation crossed an edge with no neighbouring face."""


class UnsupportedInputError(ProcgenError):
    """The mesh does not satisfy an operation's topological preconditions."""


class MeshFormatError(ProcgenError):
    def __init__(self, message: str, path=None, lineno: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)
        self.path = path
        self.lineno = lineno
