"""Base error type shared by every module.

Each concrete error carries a stable ``code`` string. The CLI prints it on
stderr and the HTTP API returns it verbatim in ``{"code", "message",
"details"}`` bodies, so scripts and the web UI share one error vocabulary.
"""

from __future__ import annotations

from typing import Any, ClassVar


class RiskError(Exception):
    """Base class for all workbench errors.

    ``details`` must stay JSON-serializable; raise sites convert enums to
    their canonical codes before attaching them.
    """

    code: ClassVar[str] = "RiskError"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details

    @property
    def message(self) -> str:
        return str(self)

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}
