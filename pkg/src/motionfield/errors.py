"""Exception hierarchy. Every error carries the name of the module that raised it."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors.

    ``module`` names the subsystem the error originated in so that callers
    (CLI, HTTP service) can attach provenance without inspecting tracebacks.
    """

    def __init__(self, message: str, *, module: str):
        super().__init__(message)
        self.module = module


class ShapeError(EngineError):
    """Mismatched or invalid array dimensions."""


class ParameterError(EngineError):
    """A parameter value outside its documented domain."""


class InputError(EngineError):
    """Invalid input data (non-finite values and the like)."""


class ConvergenceError(EngineError):
    """Iterative solver failed to reach the requested tolerance."""

    def __init__(self, message: str, *, module: str, residual: float, iterations: int):
        super().__init__(message, module=module)
        self.residual = residual
        self.iterations = iterations


class FormatError(EngineError):
    """Malformed binary file (bad magic, truncation, non-finite payload)."""


class SchemaError(EngineError):
    """Project document violates the JSON schema. ``path`` locates the offending field."""

    def __init__(self, message: str, *, module: str, path: str = ""):
        super().__init__(message, module=module)
        self.path = path


class ContractError(EngineError):
    """A pluggable component (backend, denoiser) violated its interface contract."""
