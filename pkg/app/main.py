from fastapi import FastAPI

from .api.v1 import distortions, evaluations, scores
from .config import get_settings
from .logging_config import configure_logging

configure_logging(get_settings().log_level)


app = FastAPI(
    title="Deep Prior Video Quality API",
    description=(
        "Blind video quality assessment with a per-pair trained restoration prior.\n\n"
        "Score distorted videos against a trained restorer, generate synthetic distortion "
        "ladders, and correlate scores with subjective ratings from a manifest."
    ),
    version="0.1.0",
    swagger_ui_parameters={
        "displayOperationId": False,
        "layout": "BaseLayout",
        "syntaxHighlight": {"theme": "nord"},
    },
)

# Include routers
app.include_router(scores.router, prefix="/api/v1")
app.include_router(distortions.router, prefix="/api/v1")
app.include_router(evaluations.router, prefix="/api/v1")


@app.get("/description")
def root():
    return {
        "message": "Deep Prior Video Quality API",
        "version": app.version,
        "docs": "/docs",
    }


@app.get("/health")
def health_check():
    return {"status": "healthy"}
