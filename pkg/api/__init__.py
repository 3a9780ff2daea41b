"""
API package for the optimal portfolio constructor.
"""
from api.routes import create_api

__all__ = ['create_api']
