"""OpenAI-compatible bridge for the wayfare wire protocol."""

from .client import AdapterConfig, LiveClient, ModelResponse, ReplayClient
from .schema import translate_schema

__version__ = "0.1.0"

__all__ = ["AdapterConfig", "LiveClient", "ModelResponse", "ReplayClient",
           "translate_schema", "__version__"]
