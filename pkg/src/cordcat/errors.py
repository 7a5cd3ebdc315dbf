"""Exception hierarchy shared by all modules."""


class CordError(Exception):
    pass


class SortError(CordError, TypeError):
    """A term of the wrong sort was used (e.g. data term where an agent is required)."""


class ArityError(CordError, TypeError):
    """Interface or tuple lengths/sorts do not line up."""


class StateError(CordError, ValueError):
    """An operation was called on input that has not been prepared for it."""


class LabelError(CordError, KeyError):
    pass


class RunError(CordError, ValueError):
    pass


class MatchError(CordError):
    def __init__(self, label: str, detail: str = "") -> None:
        super().__init__(f"match failed at {label}: {detail}" if detail else f"match failed at {label}")
        self.label = label


class ResolutionError(CordError):
    pass


class DSLSyntaxError(CordError, SyntaxError):
    def __init__(self, msg: str, line: int = 0, col: int = 0) -> None:
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col
