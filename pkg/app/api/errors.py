from fastapi import HTTPException, status

from app.exceptions import (
    DeepPriorError,
    DivergenceError,
    ScoringError,
)


def to_http_error(exc: Exception) -> HTTPException:
    """Map a domain failure onto the status code a client can act on"""
    if isinstance(exc, FileNotFoundError):
        return HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(exc))
    if isinstance(exc, (DivergenceError, ScoringError)):
        return HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(exc))
    if isinstance(exc, (DeepPriorError, ValueError)):
        return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc))
    return HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=str(exc))
