"""Error hierarchy shared by services and the command line."""

from typing import List, Optional


class LurkScopeError(Exception):
    """Base error with a short machine code and a readable detail."""

    code = "error"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"code": self.code, "detail": self.detail}


class EventParseError(LurkScopeError):
    """A CSV row could not be turned into an event."""

    code = "parse_error"

    def __init__(self, line: int, detail: str):
        super().__init__(f"line {line}: {detail}")
        self.line = line

    def to_dict(self) -> dict:
        return {"code": self.code, "detail": self.detail, "line": self.line}


class EmptySourceError(LurkScopeError):
    code = "empty_source"


class UnknownNodeError(LurkScopeError):
    code = "unknown_node"

    def __init__(self, node):
        super().__init__(f"Unknown node: {node}")
        self.node = node


class InvalidParameterError(LurkScopeError):
    code = "invalid_parameter"


class FitError(LurkScopeError):
    code = "fit_error"


class ConfigError(LurkScopeError):
    """Configuration rejected at startup."""

    code = "config_error"

    def __init__(self, fields: List[str], detail: Optional[str] = None):
        super().__init__(detail or f"Invalid configuration field(s): {', '.join(fields)}")
        self.fields = fields

    def to_dict(self) -> dict:
        return {"code": self.code, "detail": self.detail, "fields": self.fields}


class StageError(LurkScopeError):
    code = "stage_error"

    def __init__(self, stage: str, detail: str):
        super().__init__(f"{stage}: {detail}")
        self.stage = stage
