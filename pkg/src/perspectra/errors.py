"""Exception types shared by the library and the CLI exit-code contract."""


class PerspectraError(Exception):
    exit_code = 2


class PreconditionError(PerspectraError, ValueError):
    """Inputs violate an operation's precondition (CLI exit code 2)."""

    exit_code = 2


class CapExceeded(PerspectraError):
    """An enumeration would exceed its configured cap (CLI exit code 3)."""

    exit_code = 3

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what} of size {size} exceeds the cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap
