"""FastAPI application over the core package.

The service owns no business logic: every mutation routes through the
library or the study, every report through analytics. A single static
bearer token guards everything except the health check. All errors share
the shape {"error": {"code": ..., "message": ...}}.
"""

import base64
import binascii
import os
from dataclasses import dataclass, field

from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..analytics import LexiconEntry, candidate_reports, election_report, report_payload
from ..common import dump_json, parse_rfc3339
from ..errors import ParityError
from ..evaluation import AnnotationStudy, LabelValue
from ..library import PositivLibrary, State, Verdict
from ..roster import Candidate, Election
from ..store import Store, StoredRecord
from . import schemas

TOKEN_ENV = "PARITY_API_TOKEN"

_STATUS_BY_CODE = {
    "UNAUTHORIZED": 401,
    "UNKNOWN_ELECTION": 404,
    "UNKNOWN_ID": 404,
    "UNKNOWN_ANNOTATOR": 404,
    "NOT_ASSIGNED": 404,
    "NO_ACTIVE_PLAN": 404,
    "NOT_PENDING": 409,
    "DUPLICATE_LABEL": 409,
    "TEXT_TOO_LONG": 422,
    "EDIT_TOO_LONG": 422,
    "EMPTY_TEXT": 422,
}


@dataclass
class ElectionContext:
    election: Election
    candidates: list[Candidate]
    store: Store


@dataclass
class ServiceState:
    """Everything the handlers read or mutate."""

    library: PositivLibrary
    elections: dict[str, ElectionContext] = field(default_factory=dict)
    lexicon: list[LexiconEntry] = field(default_factory=list)
    study: AnnotationStudy | None = None
    token: str | None = None
    page_size_default: int = 50
    cors_origins: tuple[str, ...] = ()

    def context(self, election_id: str) -> ElectionContext:
        ctx = self.elections.get(election_id)
        if ctx is None:
            raise ParityError("UNKNOWN_ELECTION", f"no election {election_id!r} is being served")
        return ctx


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def _encode_cursor(created_at: str, tweet_id: str) -> str:
    raw = f"{created_at}|{tweet_id}".encode("utf-8")
    return base64.urlsafe_b64encode(raw).decode("ascii")


def _decode_cursor(cursor: str) -> tuple[str, str]:
    try:
        raw = base64.urlsafe_b64decode(cursor.encode("ascii")).decode("utf-8")
        created_at, _, tweet_id = raw.partition("|")
        if not tweet_id:
            raise ValueError("missing id")
        return created_at, tweet_id
    except (ValueError, binascii.Error) as exc:
        raise ParityError("BAD_CURSOR", f"cursor does not parse: {exc}") from exc


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="paritybot", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.parity = state

    if state.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(state.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(ParityError)
    async def parity_error_handler(request: Request, exc: ParityError):
        status = _STATUS_BY_CODE.get(exc.code, 400)
        return _error_response(status, exc.code, exc.message)

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error_response(400, "BAD_REQUEST", str(exc.errors()[:3]))

    def require_auth(request: Request) -> None:
        if not state.token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {state.token}":
            raise ParityError("UNAUTHORIZED", "missing or invalid bearer token")

    authed = Depends(require_auth)

    @app.get("/v1/healthz", response_model=schemas.HealthOut)
    async def healthz():
        return schemas.HealthOut()

    # --- feed ----------------------------------------------------------

    @app.get("/v1/feed", response_model=schemas.FeedPage, dependencies=[authed])
    async def feed(
        election: str,
        since: str | None = None,
        min_toxicity: float | None = None,
        cursor: str | None = None,
        page_size: int | None = None,
    ):
        ctx = state.context(election)
        size = page_size if page_size is not None else state.page_size_default
        if size < 1 or size > 500:
            raise ParityError("BAD_REQUEST", f"page_size {size} outside [1, 500]")
        if min_toxicity is not None and not 0.0 <= min_toxicity < 1.0:
            raise ParityError("BAD_REQUEST", f"min_toxicity {min_toxicity} outside [0,1)")
        since_at = parse_rfc3339(since) if since is not None else None

        def wanted(record: StoredRecord) -> bool:
            if record.decision is None:
                return False
            if since_at is not None and record.raw.created_at < since_at:
                return False
            if min_toxicity is not None:
                return record.scores.toxicity > min_toxicity
            return record.decision.flagged

        rows = [r for r in ctx.store.query() if wanted(r)]
        # Newest first; id breaks created_at ties so pagination never skips.
        rows.sort(key=lambda r: (r.raw.created_at, r.raw.id), reverse=True)
        if cursor is not None:
            after_created, after_id = _decode_cursor(cursor)
            after_key = (parse_rfc3339(after_created), after_id)
            rows = [r for r in rows if (r.raw.created_at, r.raw.id) < after_key]
        page = rows[:size]
        next_cursor = None
        if len(rows) > size and page:
            last = page[-1]
            next_cursor = _encode_cursor(last.raw.created_at.isoformat(), last.raw.id)
        return schemas.FeedPage(
            items=[schemas.FeedItem.from_record(r) for r in page], next_cursor=next_cursor
        )

    # --- reports --------------------------------------------------------

    @app.get("/v1/reports", dependencies=[authed])
    async def reports(election: str, threshold: float | None = None):
        ctx = state.context(election)
        t = threshold if threshold is not None else ctx.election.analysis_threshold_default
        if not 0.0 < t < 1.0:
            raise ParityError("BAD_REQUEST", f"threshold {t} outside (0,1)")
        summary = election_report(ctx.store, ctx.election, t, ctx.candidates)
        per_candidate = candidate_reports(ctx.store, ctx.candidates, t, state.lexicon)
        payload = report_payload(summary, per_candidate)
        return Response(content=dump_json(payload), media_type="application/json")

    # --- moderation -----------------------------------------------------

    @app.get("/v1/positivtweets", response_model=schemas.PositivTweetList, dependencies=[authed])
    async def list_positivtweets(
        entry_state: str | None = Query(None, alias="state"),
    ):
        if entry_state is None:
            entries = state.library.all_entries()
        else:
            try:
                wanted_state = State(entry_state.strip().upper())
            except ValueError:
                raise ParityError("BAD_REQUEST", f"unknown state {entry_state!r}")
            entries = state.library.by_state(wanted_state)
        return schemas.PositivTweetList(
            items=[schemas.PositivTweetOut.from_entry(e) for e in entries]
        )

    @app.post(
        "/v1/positivtweets",
        response_model=schemas.PositivTweetOut,
        status_code=201,
        dependencies=[authed],
    )
    async def submit_positivtweet(body: schemas.SubmitRequest):
        entry = state.library.submit(body.text, body.attribution)
        return schemas.PositivTweetOut.from_entry(entry)

    @app.post(
        "/v1/positivtweets/{entry_id}/review",
        response_model=schemas.PositivTweetOut,
        dependencies=[authed],
    )
    async def review_positivtweet(entry_id: int, body: schemas.ReviewRequest):
        entry = state.library.review(entry_id, Verdict(body.verdict), body.edited_text)
        return schemas.PositivTweetOut.from_entry(entry)

    # --- annotation -------------------------------------------------------

    def active_study() -> AnnotationStudy:
        if state.study is None:
            raise ParityError("NO_ACTIVE_PLAN", "no annotation study is loaded")
        return state.study

    @app.get("/v1/annotation/next", dependencies=[authed])
    async def annotation_next(annotator: str):
        task = active_study().next_task(annotator)
        if task is None:
            return Response(status_code=204)
        return JSONResponse(content=schemas.TaskOut(**task).model_dump())

    @app.post(
        "/v1/annotation/labels",
        response_model=schemas.LabelOut,
        status_code=201,
        dependencies=[authed],
    )
    async def annotation_label(body: schemas.LabelRequest):
        label = active_study().submit_label(
            body.tweet_id, body.annotator_id, LabelValue(body.value)
        )
        return schemas.LabelOut.from_label(label)

    @app.get("/v1/annotation/agreement", response_model=schemas.AgreementOut, dependencies=[authed])
    async def annotation_agreement():
        return schemas.AgreementOut(**active_study().agreement())

    return app


def state_from_config(config, token: str | None = None) -> ServiceState:
    """Assemble service state from an AppConfig: roster, store, library,
    lexicon, and (when configured) the annotation study."""
    from ..analytics import load_lexicon
    from ..evaluation import load_study
    from ..roster import load_roster
    from ..store import StoreRegistry

    candidates = load_roster(config.roster_path, config.election.id)
    registry = StoreRegistry(config.store_root)
    store = registry.open(config.election.id, create=True)
    library = PositivLibrary(config.library_snapshot)
    for seed_file in config.seed_files:
        library.import_seed(seed_file)
    lexicon = load_lexicon(config.lexicon_path) if config.lexicon_path else []
    study = None
    if config.study_path is not None and config.study_path.exists():
        study = load_study(config.study_path)
    resolved_token = token if token is not None else os.environ.get(TOKEN_ENV)
    if not resolved_token and config.api.host not in ("127.0.0.1", "localhost", "::1"):
        raise ParityError(
            "CONFIG_INVALID", f"{TOKEN_ENV} must be set to bind non-loopback host {config.api.host!r}"
        )
    return ServiceState(
        library=library,
        elections={
            config.election.id: ElectionContext(
                election=config.election, candidates=candidates, store=store
            )
        },
        lexicon=lexicon,
        study=study,
        token=resolved_token or None,
        page_size_default=config.api.page_size_default,
        cors_origins=config.api.cors_origins,
    )
