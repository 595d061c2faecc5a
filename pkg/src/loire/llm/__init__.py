from .client import (
    CallableClient,
    ClientError,
    CompletionRequest,
    HttpChatClient,
    MissingFixtureError,
    ModelClient,
    ReplayClient,
    RetryingClient,
    TransientClientError,
    record_fixture,
)

__all__ = [
    "CallableClient",
    "ClientError",
    "CompletionRequest",
    "HttpChatClient",
    "MissingFixtureError",
    "ModelClient",
    "ReplayClient",
    "RetryingClient",
    "TransientClientError",
    "record_fixture",
]
