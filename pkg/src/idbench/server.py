"""HTTP surface of the survey service (FastAPI)."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from .errors import ConflictError, NotFoundError, ValidationError
from .survey import SurveyStore, session_view


class CreateSessionBody(BaseModel):
    participant: str


class DirectAnswerBody(BaseModel):
    relatedness: int
    similarity: int


class IndirectAnswerBody(BaseModel):
    chosen: str


def create_app(store: SurveyStore) -> FastAPI:
    app = FastAPI(title="idbench survey service")

    @app.exception_handler(ValidationError)
    async def _validation(_request: Request, exc: ValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(ConflictError)
    async def _conflict(_request: Request, exc: ConflictError):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(NotFoundError)
    async def _not_found(_request: Request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.post("/sessions")
    def create_session(body: CreateSessionBody):
        session = store.create(body.participant)
        return session_view(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_view(store.get(session_id))

    @app.post("/sessions/{session_id}/direct/{index}")
    def answer_direct(session_id: str, index: int, body: DirectAnswerBody):
        session = store.answer_direct(session_id, index, body.relatedness, body.similarity)
        return {"ok": True, "state": session.state}

    @app.post("/sessions/{session_id}/indirect/{index}")
    def answer_indirect(session_id: str, index: int, body: IndirectAnswerBody):
        session = store.answer_indirect(session_id, index, body.chosen)
        return {"ok": True, "state": session.state}

    @app.get("/export")
    def export(format: str = "json", kind: str = "", include_partial: bool = False):
        direct_csv, indirect_csv = store.export_ratings(include_partial=include_partial)
        if format == "csv":
            if kind == "direct":
                return PlainTextResponse(direct_csv, media_type="text/csv")
            if kind == "indirect":
                return PlainTextResponse(indirect_csv, media_type="text/csv")
            raise ValidationError("format=csv requires kind=direct or kind=indirect")
        return {"direct": direct_csv, "indirect": indirect_csv}

    return app
