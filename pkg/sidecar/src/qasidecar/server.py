"""HTTP service speaking the prediction wire protocol.

POST /predict -> span payload or {"no_answer": true}
POST /train   -> blocks until fine-tuning finishes, reports steps
GET  /health  -> {"status": "ok"}

Prediction requests issued while a training request is running are
rejected with 409, matching the orchestrator's contract that parts are
strictly sequential.  Malformed bodies get a 400 with a message.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .qamodel import MODEL_ID, TinySpanModel


class PredictRequest(BaseModel):
    context: str
    question: str


class TrainAnswer(BaseModel):
    text: str
    answer_start: int


class TrainExample(BaseModel):
    id: str | None = None
    question: str
    context: str
    answers: list[TrainAnswer]


class TrainRequest(BaseModel):
    examples: list[TrainExample]


def create_app(
    model: TinySpanModel | None = None,
    batch_size: int = 8,
    epochs: int = 1,
) -> FastAPI:
    app = FastAPI(title="qasidecar", version="0.1.0")
    state = app.state
    state.model = model or TinySpanModel()
    state.batch_size = batch_size
    state.epochs = epochs
    state.training = threading.Event()

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "model": MODEL_ID}

    @app.post("/predict")
    def predict(body: PredictRequest):
        if state.training.is_set():
            return JSONResponse(
                status_code=409, content={"error": "training in progress"}
            )
        result = state.model.predict(body.context, body.question)
        if result is None:
            return {"no_answer": True}
        return result

    @app.post("/train")
    def train(body: TrainRequest):
        if state.training.is_set():
            return JSONResponse(
                status_code=409, content={"error": "training in progress"}
            )
        state.training.set()
        try:
            examples = [ex.model_dump() for ex in body.examples]
            steps = state.model.train(examples, state.batch_size, state.epochs)
        except Exception as exc:  # model failure -> 500 with message
            return JSONResponse(status_code=500, content={"error": str(exc)})
        finally:
            state.training.clear()
        return {"status": "ok", "steps": steps}

    return app
