"""
API Routes for the portfolio constructor.
Exposes the report the CLI produces as JSON endpoints for a remote dashboard.
"""
import json
from typing import Tuple

from flask import Flask, Response, jsonify, request
from flask_cors import CORS

from api.models import ApiResponse, PortfolioRequest
from portfolio_system import create_portfolio_system
from portfolio_system.config import DEFAULT_ENUMERATION_CAP
from portfolio_system.errors import ConfigError, InputError, NumericalError, PortfolioError
from portfolio_system.market_data import parse_parameter_file
from portfolio_system.portfolio_enumeration import (
    METHODS_FOR_CHOICE, count_portfolios, rank_portfolios, single_portfolio_report
)
from reporting.renderers import report_document, select_records
from utils.logger import get_logger

logger = get_logger("API")

STATUS_FOR_ERROR = (
    (InputError, 400),
    (ConfigError, 400),
    (NumericalError, 422),
)


def _error_response(error: PortfolioError, message: str) -> Tuple[Response, int]:
    status = next((code for kind, code in STATUS_FOR_ERROR if isinstance(error, kind)), 500)
    logger.warning(f"{message}: {type(error).__name__}: {error}")
    return jsonify(ApiResponse(
        success=False,
        message=message,
        errors=[f"{type(error).__name__}: {error}"]
    ).to_dict()), status


class ApiHandler:
    """Handler for API routes, connecting to the portfolio system."""

    def __init__(self, enumeration_cap: int = DEFAULT_ENUMERATION_CAP, workers: int = 1):
        self.enumeration_cap = enumeration_cap
        self.workers = workers
        logger.info("API Handler initialized")

    def setup_routes(self, app: Flask) -> None:
        """Set up all API routes."""
        app.route('/api/portfolios', methods=['POST'])(self.construct_portfolios)
        app.route('/api/portfolios/count', methods=['GET'])(self.get_portfolio_count)
        logger.info("API routes setup complete")

    def construct_portfolios(self) -> Response:
        """Construct the portfolios for posted parameters."""
        try:
            body = PortfolioRequest.from_json(request.get_json(silent=True))
            params = parse_parameter_file(json.dumps(body.parameters))
            moments, stats = create_portfolio_system(params=params)
            methods = METHODS_FOR_CHOICE[body.method]
            if body.enumerate:
                report = rank_portfolios(moments, methods, cap=self.enumeration_cap,
                                         workers=self.workers)
            else:
                report = single_portfolio_report(moments, methods)
        except PortfolioError as e:
            return _error_response(e, "Portfolio construction failed")

        document = report_document(report, stats, select_records(report, body.top))
        return jsonify(ApiResponse(
            success=True,
            message=f"Constructed {report.P} portfolios",
            data=document
        ).to_dict())

    def get_portfolio_count(self) -> Response:
        """Number of portfolios for n assets."""
        raw = request.args.get('n', '')
        try:
            n = int(raw)
        except ValueError:
            return _error_response(ConfigError(f"n must be an integer, got {raw!r}"), "Invalid request")
        try:
            count = count_portfolios(n)
        except PortfolioError as e:
            return _error_response(e, "Invalid request")
        return jsonify(ApiResponse(
            success=True,
            message="Portfolio count computed",
            data={"n": n, "P": count}
        ).to_dict())


def create_api(enumeration_cap: int = DEFAULT_ENUMERATION_CAP, workers: int = 1):
    """
    Create the Flask app with CORS enabled and the portfolio routes registered.
    Returns:
        tuple: (app, api_handler)
    """
    app = Flask(__name__)
    CORS(app)
    api_handler = ApiHandler(enumeration_cap=enumeration_cap, workers=workers)
    api_handler.setup_routes(app)
    return app, api_handler
