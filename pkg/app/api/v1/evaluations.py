import logging
from io import BytesIO
from pathlib import Path
from typing import Dict

import pandas as pd
from fastapi import APIRouter, Query, status
from fastapi.responses import Response, StreamingResponse

from app.api.errors import to_http_error
from app.config import get_settings, load_run_config
from app.exceptions import DeepPriorError
from app.schemas.evaluation import CorrelationReport
from app.schemas.requests import EvaluationRequest
from app.services.evaluation import evaluate_manifest

logger = logging.getLogger(__name__)

router = APIRouter(prefix="/evaluations", tags=["Evaluations"])

EXCEL_MEDIA_TYPE = "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet"
CSV_MEDIA_TYPE = "text/csv"


def _excel_response(frames: Dict[str, pd.DataFrame], filename: str) -> StreamingResponse:
    output = BytesIO()
    with pd.ExcelWriter(output, engine="openpyxl") as writer:
        for sheet_name, frame in frames.items():
            frame.to_excel(writer, sheet_name=sheet_name, index=False)
    output.seek(0)
    headers = {"Content-Disposition": f'attachment; filename="{filename}"'}
    return StreamingResponse(output, media_type=EXCEL_MEDIA_TYPE, headers=headers)


def _csv_response(frame: pd.DataFrame, filename: str) -> Response:
    headers = {"Content-Disposition": f'attachment; filename="{filename}"'}
    return Response(content=frame.to_csv(index=False), media_type=CSV_MEDIA_TYPE, headers=headers)


@router.post("", response_model=CorrelationReport, status_code=status.HTTP_200_OK)
def create_evaluation(
    request: EvaluationRequest,
    format: str = Query("json", description="Return json, csv or excel"),
):
    """Train on the manifest's pair, score its test videos and correlate with MOS"""
    settings = get_settings()
    try:
        net_cfg, train_cfg = load_run_config(Path(request.config_path) if request.config_path else None)
        report = evaluate_manifest(
            Path(request.manifest_path),
            net_cfg,
            train_cfg,
            channel_mode=request.channel_mode,
            size=tuple(request.size) if request.size else None,
            threads=settings.threads,
        )
    except (DeepPriorError, OSError, ValueError) as exc:
        logger.warning("Evaluation of %s failed: %s", request.manifest_path, exc)
        raise to_http_error(exc) from exc

    if format.lower() == "excel":
        return _excel_response(
            {"table": report.to_frame(), "summary": report.summary_frame()},
            "evaluation.xlsx",
        )
    if format.lower() == "csv":
        return _csv_response(report.to_frame(), "evaluation.csv")
    return report
