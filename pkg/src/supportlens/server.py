"""HTTP/JSON API over the exploration pipeline.

State model: the corpus, search index, labels, and similar-pair set are
immutable once the server starts. Everything mutable (current search,
zoom path, filter, highlights, summaries, mind maps, question boards)
lives in a per-session object addressed by an unguessable token, so the
browser client stays a pure renderer and sessions never see each other.

Within a session, write requests serialize on the session lock. Calls
that reach the language model run as background jobs: the submit
endpoint returns a job id immediately and the client polls /api/job/{id}
until the job is done or failed. Provider failures surface as
``upstream_llm`` errors, never as a crashed server.
"""
from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import explorer, llm
from .config import AppConfig
from .corpus import CorpusStore
from .errors import NotFoundError, ProviderError, StaleViewError, ValidationError
from .labeling import KINDS, LabelStore
from .llm import BoardStore, MindMap, SummaryDoc, derive_mindmap, summarize
from .notes import Anchor, NoteStore
from .search import SearchConfig, SearchIndex
from .similarity import PairSet
from .topics import assign_topics, fit_lda, topic_keywords

SCHEMA_VERSION = 1

_ERROR_STATUS = {
    "bad_request": 400,
    "not_found": 404,
    "stale_view": 409,
    "upstream_llm": 502,
    "internal": 500,
}


class ApiError(Exception):
    def __init__(self, code: str, message: str, detail: Any = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.detail = detail

    def response(self) -> JSONResponse:
        body = {"error": {"code": self.code, "message": self.message}}
        if self.detail is not None:
            body["error"]["detail"] = self.detail
        return JSONResponse(status_code=_ERROR_STATUS[self.code], content=body)


@dataclass
class Job:
    id: str
    status: str = "pending"  # pending | done | error
    result: Any = None
    error_code: str | None = None
    error_message: str | None = None


@dataclass
class Session:
    id: str
    created_at: float
    notes: NoteStore
    boards: BoardStore
    lock: threading.Lock = field(default_factory=threading.Lock)
    query: str = ""
    results: list = field(default_factory=list)
    base_root: explorer.CircleNode | None = None
    filter: explorer.SupportFilter = field(default_factory=explorer.SupportFilter)
    filtered_root: explorer.CircleNode | None = None
    layout: explorer.LayoutCircle | None = None
    path: tuple[str, ...] = ()
    summaries: dict[str, SummaryDoc] = field(default_factory=dict)
    mindmaps: dict[str, MindMap] = field(default_factory=dict)


class AppState:
    """Immutable artifacts plus the session and job tables."""

    def __init__(self, store: CorpusStore, index: SearchIndex,
                 labels: LabelStore, pairs: PairSet, config: AppConfig,
                 static_dir: Path | None = None):
        self.store = store
        self.index = index
        self.labels = labels
        self.pairs = pairs
        self.config = config
        self.static_dir = static_dir
        self._sessions: dict[str, Session] = {}
        self._jobs: dict[str, Job] = {}
        self._table_lock = threading.Lock()

    @classmethod
    def from_dirs(cls, store_dir: str | Path, index_dir: str | Path | None = None,
                  config: AppConfig | None = None,
                  static_dir: str | Path | None = None) -> "AppState":
        store_dir = Path(store_dir)
        index_dir = Path(index_dir) if index_dir else store_dir
        if static_dir is not None:
            static_dir = Path(static_dir)
            if not static_dir.is_dir():
                raise ValidationError(
                    f"static asset directory {static_dir} does not exist"
                )
        artifacts = [
            ("corpus store", "supportlens ingest", store_dir,
             lambda: CorpusStore.load(store_dir)),
            ("search index", "supportlens index", index_dir,
             lambda: SearchIndex.load(index_dir)),
            ("labels", "supportlens label", store_dir,
             lambda: LabelStore.load(store_dir)),
            ("pair set", "supportlens pairs", store_dir,
             lambda: PairSet.load(store_dir)),
        ]
        loaded = []
        for name, command, where, load in artifacts:
            try:
                loaded.append(load())
            except FileNotFoundError as exc:
                raise ValidationError(
                    f"missing {name} under {where}; run `{command}` first"
                ) from exc
        store, index, labels, pairs = loaded
        return cls(store, index, labels, pairs, config or AppConfig(),
                   static_dir=static_dir)

    def _resolve_body(self, target: str) -> str:
        if self.store.has_post(target):
            return self.store.get_post(target)[0].body
        if self.store.has_comment(target):
            return self.store.get_comment(target).body
        raise NotFoundError(f"unknown target id: {target!r}")

    def new_session(self) -> Session:
        session = Session(
            id=secrets.token_urlsafe(16),
            created_at=time.time(),
            notes=NoteStore(self._resolve_body, self.config.palette),
            boards=BoardStore(),
        )
        with self._table_lock:
            self._sessions[session.id] = session
        return session

    def get_session(self, token: str) -> Session:
        with self._table_lock:
            if token not in self._sessions:
                raise NotFoundError(f"unknown session: {token!r}")
            return self._sessions[token]

    def new_job(self) -> Job:
        job = Job(id=secrets.token_urlsafe(12))
        with self._table_lock:
            self._jobs[job.id] = job
        return job

    def get_job(self, job_id: str) -> Job:
        with self._table_lock:
            if job_id not in self._jobs:
                raise NotFoundError(f"unknown job: {job_id!r}")
            return self._jobs[job_id]


# -- payload builders -----------------------------------------------------


def _highlight_payload(h) -> dict:
    return {
        "id": h.id,
        "target": h.anchor.target,
        "char_start": h.anchor.char_start,
        "char_end": h.anchor.char_end,
        "exact_text": h.anchor.exact_text,
        "color": h.color,
        "created_at": h.created_at,
        "edited_text": h.edited_text,
    }


def _summary_payload(doc: SummaryDoc) -> dict:
    return {
        "title": doc.title,
        "sections": [
            {"subtitle": s, "content": c} for s, c in doc.sections
        ],
        "source_color": doc.source_color,
        "stale": doc.stale,
    }


def _mindmap_node_payload(node) -> dict:
    return {
        "id": node.id,
        "label": node.label,
        "origin": node.origin,
        "children": [_mindmap_node_payload(c) for c in node.children],
    }


def _board_node_payload(node) -> dict:
    return {
        "id": node.id,
        "question": node.question,
        "origin": node.origin,
        "answer": node.answer,
        "answered": node.answered,
        "error": node.error,
        "recommendations": list(node.recommendations),
        "recommendations_stale": node.recommendations_stale,
        "children": [_board_node_payload(c) for c in node.children],
    }


def _board_payload(board) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "id": board.id,
        "selected_text": board.selected_text,
        "collapsed": board.collapsed,
        "recommendations": list(board.recommendations),
        "degraded": board.degraded,
        "threads": [_board_node_payload(t) for t in board.threads],
    }


def _labels_payload(labels) -> dict:
    return {kind: labels.level_for(kind) for kind in KINDS}


# -- pipeline -------------------------------------------------------------


def run_search(state: AppState, session: Session, query: str) -> None:
    """Search, cluster, and lay out; resets filter and zoom path."""
    cfg = state.config
    response = state.index.search(query, SearchConfig(n_top=cfg.n_top))
    results = response.results
    docs = [(r.post_id, state.store.get_post(r.post_id)[0].text) for r in results]
    if docs:
        k_eff = min(cfg.k, len(docs))
        model = fit_lda(docs, k=k_eff, seed=cfg.lda_seed,
                        iterations=cfg.iterations)
        assignments = assign_topics(model, docs)
        keyword_sets = topic_keywords(model, m=cfg.keywords_per_topic)
    else:
        assignments, keyword_sets = [], []
    session.query = query
    session.results = results
    session.base_root = explorer.build_hierarchy(
        results, assignments, state.labels, state.store, keyword_sets
    )
    session.filter = explorer.SupportFilter()
    _refilter(session)


def _refilter(session: Session) -> None:
    if session.base_root is None:
        raise ApiError("bad_request", "no search has been run in this session")
    session.filtered_root = explorer.apply_filter(session.base_root, session.filter)
    session.layout = explorer.pack(session.filtered_root)
    session.path = ()


def _view_payload(state: AppState, session: Session) -> dict:
    if session.filtered_root is None or session.layout is None:
        raise ApiError("bad_request", "no search has been run in this session")
    view = explorer.zoom(session.filtered_root, session.layout, list(session.path))
    payload = explorer.serialize_view(view, state.pairs)
    payload["query"] = session.query
    payload["filter"] = sorted(list(s) for s in session.filter.selections)
    return payload


# -- app ------------------------------------------------------------------


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="supportlens", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def on_api_error(_req: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(NotFoundError)
    async def on_not_found(_req: Request, exc: NotFoundError):
        return ApiError("not_found", str(exc)).response()

    @app.exception_handler(ValidationError)
    async def on_validation(_req: Request, exc: ValidationError):
        return ApiError("bad_request", str(exc)).response()

    @app.exception_handler(StaleViewError)
    async def on_stale(_req: Request, exc: StaleViewError):
        return ApiError("stale_view", str(exc)).response()

    @app.exception_handler(ProviderError)
    async def on_provider(_req: Request, exc: ProviderError):
        return ApiError("upstream_llm", str(exc)).response()

    @app.exception_handler(RequestValidationError)
    async def on_request_validation(_req: Request, exc: RequestValidationError):
        return ApiError("bad_request", "invalid request body",
                        detail=exc.errors()).response()

    @app.exception_handler(Exception)
    async def on_internal(_req: Request, exc: Exception):
        return ApiError("internal", f"{type(exc).__name__}: {exc}").response()

    def session_of(token: str) -> Session:
        if not token:
            raise ApiError("bad_request", "missing session token")
        return state.get_session(token)

    def provider() -> llm.ChatProvider:
        return llm.provider_from_env()

    def submit(job: Job, work) -> dict:
        def run():
            try:
                job.result = work()
                job.status = "done"
            except ProviderError as exc:
                job.status = "error"
                job.error_code = "upstream_llm"
                job.error_message = str(exc)
            except (NotFoundError, ValidationError) as exc:
                job.status = "error"
                job.error_code = (
                    "not_found" if isinstance(exc, NotFoundError) else "bad_request"
                )
                job.error_message = str(exc)
            except Exception as exc:  # jobs must never take the server down
                job.status = "error"
                job.error_code = "internal"
                job.error_message = f"{type(exc).__name__}: {exc}"

        threading.Thread(target=run, daemon=True).start()
        return {"schema_version": SCHEMA_VERSION, "job": job.id, "status": job.status}

    # -- sessions ---------------------------------------------------------

    @app.post("/api/session")
    def create_session():
        session = state.new_session()
        return {
            "schema_version": SCHEMA_VERSION,
            "session": session.id,
            "palette": list(state.config.palette),
            "n_top": state.config.n_top,
            "k": state.config.k,
        }

    @app.get("/api/job/{job_id}")
    def read_job(job_id: str):
        job = state.get_job(job_id)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "job": job.id,
            "status": job.status,
        }
        if job.status == "done":
            payload["result"] = job.result
        if job.status == "error":
            payload["error"] = {
                "code": job.error_code,
                "message": job.error_message,
            }
        return payload

    # -- exploration ------------------------------------------------------

    @app.get("/api/search")
    def search(q: str = "", session: str = ""):
        sess = session_of(session)
        with sess.lock:
            run_search(state, sess, q)
            return _view_payload(state, sess)

    @app.post("/api/zoom")
    def zoom(body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        path = body.get("path", [])
        if not isinstance(path, list) or not all(isinstance(p, str) for p in path):
            raise ApiError("bad_request", "path must be a list of ids")
        with sess.lock:
            if sess.filtered_root is None or sess.layout is None:
                raise ApiError("bad_request", "no search has been run in this session")
            # Validates the path against the current filtered view; raises
            # StaleViewError before any state changes.
            explorer.zoom(sess.filtered_root, sess.layout, path)
            sess.path = tuple(path)
            return _view_payload(state, sess)

    @app.post("/api/filter")
    def set_filter(body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        raw = body.get("selections", [])
        if not isinstance(raw, list):
            raise ApiError("bad_request", "selections must be a list")
        selections = set()
        for row in raw:
            if not (isinstance(row, (list, tuple)) and len(row) == 3):
                raise ApiError(
                    "bad_request",
                    "each selection is [direction, kind, level]",
                )
            selections.add(tuple(row))
        with sess.lock:
            sess.filter = explorer.SupportFilter(frozenset(selections))
            _refilter(sess)
            return _view_payload(state, sess)

    @app.get("/api/post/{post_id}")
    def post_detail(post_id: str, session: str = ""):
        sess = session_of(session)
        post, comments = state.store.get_post(post_id)
        overlays = [
            h
            for target in [post_id, *[c.id for c in comments]]
            for h in sess.notes.overlays(target)
        ]
        return {
            "schema_version": SCHEMA_VERSION,
            "post": {
                "id": post.id,
                "title": post.title,
                "body": post.body,
                "created_utc": post.created_utc,
                "labels": _labels_payload(state.labels.post_labels(post.id)),
            },
            "comments": [
                {
                    "id": c.id,
                    "body": c.body,
                    "depth": c.depth,
                    "created_utc": c.created_utc,
                    "labels": _labels_payload(state.labels.comment_labels(c.id)),
                }
                for c in comments
            ],
            "highlights": [_highlight_payload(h) for h in overlays],
        }

    # -- highlights and folders -------------------------------------------

    @app.post("/api/highlight")
    def add_highlight(body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        for key in ("target", "char_start", "char_end", "exact_text", "color"):
            if key not in body:
                raise ApiError("bad_request", f"missing field {key!r}")
        anchor = Anchor(
            body["target"], body["char_start"], body["char_end"], body["exact_text"]
        )
        with sess.lock:
            highlight = sess.notes.add_highlight(anchor, body["color"])
            return {
                "schema_version": SCHEMA_VERSION,
                "highlight": _highlight_payload(highlight),
            }

    @app.post("/api/highlight/{highlight_id}/recolor")
    def recolor(highlight_id: str, body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        color = body.get("color", "")
        with sess.lock:
            highlight = sess.notes.recolor(highlight_id, color)
            return {
                "schema_version": SCHEMA_VERSION,
                "highlight": _highlight_payload(highlight),
            }

    @app.delete("/api/highlight/{highlight_id}")
    def clear(highlight_id: str, session: str = ""):
        sess = session_of(session)
        with sess.lock:
            sess.notes.clear(highlight_id)
            return {"schema_version": SCHEMA_VERSION, "cleared": highlight_id}

    @app.post("/api/highlight/{highlight_id}/edit")
    def edit_entry(highlight_id: str, body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        if "text" not in body:
            raise ApiError("bad_request", "missing field 'text'")
        with sess.lock:
            highlight = sess.notes.edit_entry(highlight_id, body["text"])
            return {
                "schema_version": SCHEMA_VERSION,
                "highlight": _highlight_payload(highlight),
            }

    @app.get("/api/highlight/{highlight_id}/navigate")
    def navigate(highlight_id: str, session: str = ""):
        sess = session_of(session)
        anchor = sess.notes.navigate(highlight_id)
        return {
            "schema_version": SCHEMA_VERSION,
            "target": anchor.target,
            "char_start": anchor.char_start,
            "char_end": anchor.char_end,
        }

    def folder_payload(sess: Session, color: str) -> dict:
        folder = sess.notes.folder(color)
        summary = sess.summaries.get(color)
        stale = False
        if summary is not None:
            stale = summary.stale or summary.revision != sess.notes.revision(color)
        return {
            "schema_version": SCHEMA_VERSION,
            "color": color,
            "entries": [
                _highlight_payload(sess.notes.get(hid)) for hid in folder.entries
            ],
            "summary": None if summary is None else _summary_payload(summary),
            "summary_stale": stale,
        }

    @app.get("/api/folder/{color}")
    def read_folder(color: str, session: str = ""):
        sess = session_of(session)
        return folder_payload(sess, color)

    @app.post("/api/folder/{color}/summarize")
    def summarize_folder(color: str, body: dict = Body(default={})):
        sess = session_of(body.get("session", ""))
        prov = provider()
        with sess.lock:
            sess.notes.folder(color)  # validates the color
            entries = sess.notes.folder_texts(color)
            revision = sess.notes.revision(color)
        job = state.new_job()

        def work():
            try:
                doc = summarize(entries, prov, source_color=color,
                                revision=revision)
            except ProviderError:
                with sess.lock:
                    prior = sess.summaries.get(color)
                    if prior is not None:
                        prior.stale = True
                raise
            with sess.lock:
                sess.summaries[color] = doc
                sess.mindmaps[color] = derive_mindmap(
                    doc, sess.mindmaps.get(color)
                )
            return folder_payload(sess, color)

        return submit(job, work)

    @app.put("/api/folder/{color}/summary")
    def edit_summary(color: str, body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        sections = body.get("sections")
        if not isinstance(sections, list):
            raise ApiError("bad_request", "sections must be a list")
        parsed = []
        for row in sections:
            if not isinstance(row, dict) or "subtitle" not in row or "content" not in row:
                raise ApiError("bad_request",
                               "each section needs subtitle and content")
            parsed.append((row["subtitle"], row["content"]))
        with sess.lock:
            sess.notes.folder(color)  # validates the color
            revision = sess.notes.revision(color)
            doc = SummaryDoc(
                title=body.get("title", ""),
                sections=tuple(parsed),
                source_color=color,
                stale=False,
                revision=revision,
            )
            sess.summaries[color] = doc
            sess.mindmaps[color] = derive_mindmap(doc, sess.mindmaps.get(color))
            return folder_payload(sess, color)

    @app.get("/api/mindmap/{color}")
    def read_mindmap(color: str, session: str = ""):
        sess = session_of(session)
        sess.notes.folder(color)  # validates the color
        mindmap = sess.mindmaps.get(color)
        if mindmap is None:
            mindmap = derive_mindmap(
                sess.summaries.get(color) or SummaryDoc("", (), color)
            )
        return {
            "schema_version": SCHEMA_VERSION,
            "color": color,
            "root": _mindmap_node_payload(mindmap.root),
        }

    @app.post("/api/mindmap/{color}/node")
    def add_mindmap_node(color: str, body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        parent_id = body.get("parent_id", "")
        label = body.get("label", "")
        with sess.lock:
            sess.notes.folder(color)  # validates the color
            mindmap = sess.mindmaps.get(color)
            if mindmap is None:
                mindmap = derive_mindmap(
                    sess.summaries.get(color) or SummaryDoc("", (), color)
                )
                sess.mindmaps[color] = mindmap
            node = mindmap.add_user_node(parent_id, label)
            return {
                "schema_version": SCHEMA_VERSION,
                "color": color,
                "node": _mindmap_node_payload(node),
                "root": _mindmap_node_payload(mindmap.root),
            }

    # -- question boards --------------------------------------------------

    @app.post("/api/board")
    def create_board(body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        selected_text = body.get("selected_text", "")
        prov = provider()
        job = state.new_job()

        def work():
            with sess.lock:
                board = sess.boards.create(selected_text, prov)
                return _board_payload(board)

        return submit(job, work)

    @app.get("/api/board/{board_id}")
    def read_board(board_id: str, session: str = ""):
        sess = session_of(session)
        return _board_payload(sess.boards.get(board_id))

    @app.post("/api/board/{board_id}/ask")
    def ask(board_id: str, body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        prov = provider()
        question = body.get("question")
        parent_id = body.get("parent_id")
        node_id = body.get("node_id")
        job = state.new_job()

        def work():
            with sess.lock:
                node = sess.boards.ask(
                    board_id, prov, question=question,
                    parent_id=parent_id, node_id=node_id,
                )
                return {
                    "schema_version": SCHEMA_VERSION,
                    "board": board_id,
                    "node": _board_node_payload(node),
                }

        return submit(job, work)

    @app.post("/api/board/{board_id}/branch")
    def branch(board_id: str, body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        question = str(body.get("question", ""))
        parent_id = body.get("parent_id", "")
        with sess.lock:
            # Same origin rule as ask(): a question taken verbatim from the
            # parent's recommendations stays "recommended".
            parent = sess.boards.find_node(board_id, parent_id)
            origin = ("recommended" if question.strip() in parent.recommendations
                      else "user")
            node = sess.boards.branch(board_id, parent_id, question,
                                      origin=origin)
            return {
                "schema_version": SCHEMA_VERSION,
                "board": board_id,
                "node": _board_node_payload(node),
            }

    @app.post("/api/board/{board_id}/followups")
    def follow_ups(board_id: str, body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        node_id = body.get("node_id", "")
        prov = provider()
        job = state.new_job()

        def work():
            with sess.lock:
                questions = sess.boards.follow_ups(board_id, node_id, prov)
                return {
                    "schema_version": SCHEMA_VERSION,
                    "board": board_id,
                    "node": node_id,
                    "recommendations": questions,
                }

        return submit(job, work)

    @app.post("/api/board/{board_id}/collapse")
    def collapse(board_id: str, body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        with sess.lock:
            board = sess.boards.set_collapsed(
                board_id, bool(body.get("collapsed", True))
            )
            return _board_payload(board)

    @app.put("/api/board/{board_id}/node/{node_id}/answer")
    def edit_answer(board_id: str, node_id: str, body: dict = Body(...)):
        sess = session_of(body.get("session", ""))
        if "text" not in body:
            raise ApiError("bad_request", "missing field 'text'")
        with sess.lock:
            node = sess.boards.edit_answer(board_id, node_id, body["text"])
            return {
                "schema_version": SCHEMA_VERSION,
                "board": board_id,
                "node": _board_node_payload(node),
            }

    # -- session transfer -------------------------------------------------

    @app.get("/api/session/{token}/export")
    def export_session(token: str):
        sess = state.get_session(token)
        with sess.lock:
            return {
                "schema_version": SCHEMA_VERSION,
                "notes": sess.notes.to_payload(),
                "boards": sess.boards.to_payload(),
            }

    @app.post("/api/session/import")
    def import_session(body: dict = Body(...)):
        if body.get("schema_version") != SCHEMA_VERSION:
            raise ApiError(
                "bad_request",
                f"unsupported session document version {body.get('schema_version')!r}",
            )
        session = state.new_session()
        with session.lock:
            session.notes = NoteStore.from_payload(
                body.get("notes", {"highlights": []}), state._resolve_body
            )
            session.boards = BoardStore.from_payload(body.get("boards", {}))
        return {"schema_version": SCHEMA_VERSION, "session": session.id}

    if state.static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # Mounted last so /api/* wins; html=True serves index.html at /.
        app.mount("/", StaticFiles(directory=state.static_dir, html=True),
                  name="webui")

    return app


def serve(state: AppState, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(state), host=host, port=state.config.port,
                log_level="warning")
