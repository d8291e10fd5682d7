from .app import app, create_app
from .handlers import HANDLERS, dispatch

__all__ = ["app", "create_app", "dispatch", "HANDLERS"]
