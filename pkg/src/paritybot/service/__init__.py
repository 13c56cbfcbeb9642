"""HTTP service exposing the pipeline's state: feed, reports, moderation
queue, and the annotation workflow."""

from .app import ElectionContext, ServiceState, create_app, state_from_config

__all__ = ["ElectionContext", "ServiceState", "create_app", "state_from_config"]
