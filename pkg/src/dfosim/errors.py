"""Shared exception type with short machine-checkable codes."""


class DfoError(ValueError):
    """Raised on contract violations; ``code`` is a short stable identifier."""

    def __init__(self, code, detail=""):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}" if detail else code)
