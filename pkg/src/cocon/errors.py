"""Structured errors and diagnostics shared by every stage of the kernel."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass
class Diagnostic:
    """A single reportable rejection: error code, position, violated rule."""

    code: str
    message: str
    span: int = -1
    rule: str = ""

    def render(self, path: str = "<input>") -> str:
        return f"ERROR {self.code} {path}:{self.span} {self.rule}: {self.message}"


class CheckError(Exception):
    """Raised by the type checker; carries exactly one primary diagnostic."""

    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic


def reject(code: str, message: str, span: int = -1, rule: str = "") -> "CheckError":
    return CheckError(Diagnostic(code, message, span, rule))


class KernelError(Exception):
    """Internal invariant violation: evaluation met a term the checker should
    never have let through."""


class LfSubstError(KernelError):
    """Substitution plumbing failure (lookup or truncation)."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class UnboundLfVar(LfSubstError):
    def __init__(self, message: str):
        super().__init__("UnboundLfVar", message)


class TruncMismatch(LfSubstError):
    def __init__(self, message: str):
        super().__init__("TruncMismatch", message)


class UnboundCompVar(KernelError):
    pass


class KindMismatchError(KernelError):
    """A ctx payload met a term position or vice versa."""


class FuelExhausted(Exception):
    """Reduction ran out of budget; carries the partially reduced term."""

    def __init__(self, partial):
        super().__init__("reduction step budget exhausted")
        self.partial = partial


class IllFormedScrutinee(KernelError):
    """Recursor scrutinee reduced to something neither neutral nor a box."""


class NonCanonicalHead(KernelError):
    """Recursor met a tm-neutral headed by a constant other than lam/app."""


class NotNeutral(KernelError):
    """typeof was asked about a term that is not weak-head neutral."""
