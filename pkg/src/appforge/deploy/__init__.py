"""Stable slugs, live deployments, preview links, path resolution."""

from .registry import Deployment, DeploymentRegistry
from .slugs import make_slug

__all__ = ["Deployment", "DeploymentRegistry", "make_slug"]
