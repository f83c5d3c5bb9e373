"""Request/response models for the session API."""

from __future__ import annotations

from pydantic import BaseModel


class SessionCreateRequest(BaseModel):
    seed: str
    n_queries: int | None = None


class SessionCreateResponse(BaseModel):
    session_id: str
    candidate_count: int


class QueryPayload(BaseModel):
    query_id: str
    left: list[str]  # 256 hex colors
    right: list[str]
    remaining: int


class ResponseRequest(BaseModel):
    query_id: str
    choice: int


class ResponseAck(BaseModel):
    remaining: int


class RankedEntry(BaseModel):
    id: str
    score: float
    colors: list[str]


class NovelResult(BaseModel):
    colors: list[str]
    reward: float


class ResultsPayload(BaseModel):
    ranking: list[RankedEntry]
    novel: NovelResult | None


class PendingPayload(BaseModel):
    status: str
    poll: str
