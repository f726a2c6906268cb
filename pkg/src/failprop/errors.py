"""Exception types and source locations shared by the parser and the model."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class FailpropError(Exception):
    """Base class for every error raised by the package."""


class ParseError(FailpropError):
    """Lexical, syntax or reference error in DSL source text."""

    def __init__(self, message: str, span: SourceSpan, expected: tuple[str, ...] = ()):
        if not message:
            raise ValueError("ParseError message must not be empty")
        self.message = message
        self.span = span
        self.expected = tuple(expected)
        super().__init__(str(self))

    def __str__(self) -> str:
        text = f"{self.span}: {self.message}"
        if self.expected and not self.message.startswith("expected"):
            text += f" (expected {', '.join(self.expected)})"
        return text


class ModelError(FailpropError):
    """A model failed structural validation; carries every violation found."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        lines = "\n".join(str(v) for v in self.violations)
        super().__init__(f"{len(self.violations)} structural violation(s)\n{lines}")


class EngineError(FailpropError):
    """Internal invariant broken (an unresolved reference during evaluation)."""
