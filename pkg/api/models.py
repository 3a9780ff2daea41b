"""
Models for the portfolio API.
Defines the response envelope and the request schema.
"""
import time
from typing import Any, Dict, List, Optional
from dataclasses import asdict, dataclass, field

from portfolio_system.config import MethodChoice
from portfolio_system.errors import ConfigError, MalformedDocument


@dataclass
class ApiResponse:
    """Standard API response format."""
    success: bool
    message: str
    data: Optional[Any] = None
    errors: Optional[List[str]] = None
    timestamp: float = field(default_factory=time.time)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class PortfolioRequest:
    """Body of POST /api/portfolios."""
    parameters: Dict[str, Any]   # assets, means, covariance
    enumerate: bool = False
    method: MethodChoice = MethodChoice.BOTH
    top: Optional[int] = None

    @classmethod
    def from_json(cls, body: Any) -> "PortfolioRequest":
        if not isinstance(body, dict):
            raise MalformedDocument("request body must be a JSON object")
        parameters = {key: body[key] for key in ("assets", "means", "covariance") if key in body}

        enumerate_flag = body.get("enumerate", False)
        if not isinstance(enumerate_flag, bool):
            raise ConfigError("'enumerate' must be a boolean")
        try:
            method = MethodChoice(body.get("method", "both"))
        except ValueError:
            raise ConfigError(f"unknown method {body.get('method')!r}")
        top = body.get("top")
        if top is not None and (isinstance(top, bool) or not isinstance(top, int) or top < 1):
            raise ConfigError("'top' must be a positive integer")
        return cls(parameters=parameters, enumerate=enumerate_flag, method=method, top=top)
