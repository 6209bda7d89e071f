"""Prompt pipelines: folder summaries, recommended questions, answers,
mind maps, and branching question boards.

The three prompt templates are fixed text; rendering only substitutes the
placeholder site, nothing else, so prompt output is byte-auditable. The
questions placeholder is "{current statement}" which contains a space, so
substitution uses str.replace rather than str.format.

Providers implement a single ``complete(system, user) -> text`` call. The
HTTP provider speaks the common chat-completions shape; the stub provider
is offline and deterministic, keyed off the prompt text, so every test
and demo runs without network access. Select with environment variables:
LLM_BASE_URL (set to ``stub:`` for the stub), LLM_API_KEY, LLM_MODEL.
"""
from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass, field
from typing import Protocol

from .errors import NotFoundError, ProviderError, ValidationError

SUMMARY_TEMPLATE = (
    'Please summarize the suggestions: {suggestions} given and output the '
    'results organized with "subtitle" and "content" that is corresponding '
    'to the subtitle, format like:"subtitle: Patience with Diagnosis; '
    'content: The patience with Diagnosis", and return a title that '
    "describes all the content."
)
QUESTIONS_TEMPLATE = (
    "As someone with mental health issues, please ask three questions about "
    "the {current statement} from three different perspectives: what, why "
    "and how to do."
)
ANSWER_TEMPLATE = (
    "As someone with expertise in mental health, please provide a brief "
    "answer to the question."
)

_RETRY_SUFFIX = (
    ' Please restate the response strictly in the format "title: ..." '
    'followed by "subtitle: ...; content: ..." for each point.'
)

FALLBACK_QUESTIONS = (
    "What does this suggestion involve in practice?",
    "Why might this suggestion help?",
    "How can someone get started with this suggestion?",
)

DEFAULT_TIMEOUT = 30.0


def render_summary_prompt(entries: list[str]) -> str:
    return SUMMARY_TEMPLATE.replace("{suggestions}", " ".join(entries))


def render_questions_prompt(statement: str) -> str:
    return QUESTIONS_TEMPLATE.replace("{current statement}", statement)


# -- providers ------------------------------------------------------------


class ChatProvider(Protocol):
    name: str

    def complete(self, system: str | None, user: str) -> str: ...


class HttpChatProvider:
    """Client for any chat-completions endpoint (base URL + key + model)."""

    name = "llm-http"

    def __init__(self, base_url: str, api_key: str = "", model: str = "",
                 temperature: float = 0.0, timeout: float = DEFAULT_TIMEOUT):
        self._base_url = base_url.rstrip("/")
        self._api_key = api_key
        self._model = model
        self._temperature = temperature
        self._timeout = timeout

    def complete(self, system: str | None, user: str) -> str:
        import httpx

        messages = []
        if system:
            messages.append({"role": "system", "content": system})
        messages.append({"role": "user", "content": user})
        headers = {}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        try:
            response = httpx.post(
                f"{self._base_url}/chat/completions",
                json={
                    "model": self._model,
                    "messages": messages,
                    "temperature": self._temperature,
                },
                headers=headers,
                timeout=self._timeout,
            )
            response.raise_for_status()
            body = response.json()
            return body["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise ProviderError(self.name, str(exc)) from exc
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(self.name, f"malformed response: {exc}") from exc


STUB_SUMMARY_RESPONSE = (
    "Title: Care Notes.\n"
    "Subtitle: First Steps.\n"
    "Content: Start with small, repeatable habits drawn from the collected "
    "suggestions.\n"
    "Subtitle: Keeping Momentum.\n"
    "Content: Revisit the collected suggestions and adjust them to fit "
    "daily routines.\n"
)
STUB_QUESTIONS_RESPONSE = (
    "Question1: What does this suggestion involve day to day?\n"
    "Question2: Why does this suggestion help people in similar "
    "situations?\n"
    "Question3: How can someone start applying this suggestion safely?\n"
)
STUB_ANSWER_RESPONSE = (
    "A brief, practical first step is to try the suggestion in a low-stakes "
    "setting, notice how it feels, and adjust gradually."
)


class StubProvider:
    """Offline deterministic provider; routes on the prompt's fixed prefix."""

    name = "llm-stub"

    def complete(self, system: str | None, user: str) -> str:
        if user.startswith("Please summarize the suggestions:"):
            return STUB_SUMMARY_RESPONSE
        if user.startswith("As someone with mental health issues,"):
            return STUB_QUESTIONS_RESPONSE
        return STUB_ANSWER_RESPONSE


def provider_from_env() -> ChatProvider:
    base_url = os.environ.get("LLM_BASE_URL", "")
    if not base_url:
        raise ProviderError("llm", "LLM_BASE_URL not configured")
    if base_url.startswith("stub:"):
        return StubProvider()
    return HttpChatProvider(
        base_url,
        api_key=os.environ.get("LLM_API_KEY", ""),
        model=os.environ.get("LLM_MODEL", ""),
    )


# -- response parsing -----------------------------------------------------

_MARKER = re.compile(r"(?i)\b(title|subtitle|content)\s*\d*\s*:")
_QUESTION_MARKER = re.compile(r"(?i)\bquestion\s*\d*\s*:")
_ENUM_PREFIX = re.compile(r"^\s*(?:\d+\s*[.)]|[-*•])\s*")
# List decoration of the *next* item otherwise leaks into a chunk's tail.
_TRAILING_ENUM = re.compile(r"\n\s*(?:\d+\s*[.)]|[-*•])\s*$")


def _clean_heading(text: str) -> str:
    text = text.strip().strip(";").strip()
    if text.endswith("."):
        text = text[:-1]
    return text.strip().strip('"').strip()


def parse_summary(text: str) -> tuple[str, list[tuple[str, str]]]:
    """Extract title and (subtitle, content) pairs from a model response.

    Markers are matched case-insensitively anywhere in the text, so both
    line-per-field and inline "subtitle: X; content: Y" shapes parse, and
    numbered-list or bold decoration around markers is tolerated.
    """
    plain = text.replace("*", "")
    matches = list(_MARKER.finditer(plain))
    if not matches:
        raise ValidationError("no summary markers found in response")
    title = ""
    sections: list[tuple[str, str]] = []
    pending_subtitle: str | None = None
    for match, nxt in itertools.zip_longest(matches, matches[1:]):
        kind = match.group(1).lower()
        chunk = plain[match.end(): nxt.start() if nxt else len(plain)]
        chunk = _TRAILING_ENUM.sub("", chunk)
        if kind == "title":
            if not title:
                title = _clean_heading(chunk)
        elif kind == "subtitle":
            if pending_subtitle is not None:
                sections.append((pending_subtitle, ""))
            pending_subtitle = _clean_heading(chunk)
        else:
            content = " ".join(chunk.split()).strip(";").strip()
            sections.append((pending_subtitle or "", content))
            pending_subtitle = None
    if pending_subtitle is not None:
        sections.append((pending_subtitle, ""))
    if not sections:
        raise ValidationError("no sections found in summary response")
    return title, sections


def parse_questions(text: str) -> list[str]:
    plain = text.replace("*", "")
    matches = list(_QUESTION_MARKER.finditer(plain))
    if matches:
        chunks = [
            _TRAILING_ENUM.sub("", plain[m.end(): n.start() if n else len(plain)])
            for m, n in itertools.zip_longest(matches, matches[1:])
        ]
    else:
        chunks = [_ENUM_PREFIX.sub("", line) for line in plain.splitlines()]
    questions = [" ".join(chunk.split()) for chunk in chunks]
    return [q for q in questions if q]


# -- summaries and mind maps ----------------------------------------------


@dataclass
class SummaryDoc:
    title: str
    sections: tuple[tuple[str, str], ...]
    source_color: str = ""
    stale: bool = False
    revision: int = -1

    @property
    def empty(self) -> bool:
        return not self.sections


def summarize(entries: list[str], provider: ChatProvider,
              source_color: str = "", revision: int = -1) -> SummaryDoc:
    """Summarize folder entries; empty folders never reach the provider."""
    if not entries:
        return SummaryDoc("", (), source_color, stale=False, revision=revision)
    prompt = render_summary_prompt(entries)
    response = provider.complete(None, prompt)
    try:
        title, sections = parse_summary(response)
    except ValidationError:
        response = provider.complete(None, prompt + _RETRY_SUFFIX)
        try:
            title, sections = parse_summary(response)
        except ValidationError as exc:
            raise ProviderError(provider.name, str(exc)) from exc
    return SummaryDoc(title, tuple(sections), source_color, stale=False,
                      revision=revision)


@dataclass
class MindMapNode:
    id: str
    label: str
    origin: str  # machine | user
    children: list["MindMapNode"] = field(default_factory=list)


@dataclass
class MindMap:
    root: MindMapNode
    next_user_seq: int = 1

    def _walk(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)

    def find(self, node_id: str) -> MindMapNode:
        for node in self._walk():
            if node.id == node_id:
                return node
        raise NotFoundError(f"unknown mind map node: {node_id!r}")

    def add_user_node(self, parent_id: str, label: str) -> MindMapNode:
        label = label.strip()
        if not label:
            raise ValidationError("mind map label must be non-empty")
        parent = self.find(parent_id)
        node = MindMapNode(f"u{self.next_user_seq}", label, "user")
        self.next_user_seq += 1
        parent.children.append(node)
        return node


def derive_mindmap(summary: SummaryDoc,
                   previous: MindMap | None = None) -> MindMap:
    """Root is the summary title, children its subtitles in order.

    User-added nodes from the previous map reattach under the new node
    whose label matches their old parent's label; when no label matches
    any more they land under the root rather than being dropped.
    """
    root = MindMapNode("m0", summary.title, "machine")
    root.children = [
        MindMapNode(f"m{i}", subtitle, "machine")
        for i, (subtitle, _) in enumerate(summary.sections, start=1)
    ]
    result = MindMap(root)
    if previous is None:
        return result
    result.next_user_seq = previous.next_user_seq
    by_label = {node.label: node for node in result._walk()}

    def carry(old_parent: MindMapNode, old_node: MindMapNode) -> None:
        if old_node.origin != "user":
            for child in old_node.children:
                carry(old_node, child)
            return
        new_parent = by_label.get(old_parent.label, root)
        copied = MindMapNode(old_node.id, old_node.label, "user")
        new_parent.children.append(copied)
        by_label.setdefault(copied.label, copied)
        for child in old_node.children:
            carry(old_node, child)

    for child in previous.root.children:
        carry(previous.root, child)
    return result


# -- questions and answers ------------------------------------------------


def recommend_questions(selected_text: str, provider: ChatProvider,
                        context: str | None = None) -> tuple[list[str], bool]:
    """Return exactly three questions plus a degraded flag.

    With follow-up context (a prior answer, possibly user-edited), the
    context becomes the statement questioned, so follow-ups build on the
    previous response while the template stays byte-identical.
    """
    if not selected_text.strip():
        raise ValidationError("selected text must be non-empty")
    statement = context.strip() if context and context.strip() else selected_text
    response = provider.complete(None, render_questions_prompt(statement))
    questions = parse_questions(response)[:3]
    degraded = len(questions) < 3
    for fallback in FALLBACK_QUESTIONS:
        if len(questions) >= 3:
            break
        if fallback not in questions:
            questions.append(fallback)
    return questions, degraded


def answer(question: str, provider: ChatProvider) -> str:
    if not question.strip():
        raise ValidationError("question must be non-empty")
    return provider.complete(ANSWER_TEMPLATE, question.strip()).strip()


# -- question boards ------------------------------------------------------


@dataclass
class QuestionNode:
    id: str
    question: str
    origin: str  # recommended | user
    answer: str = ""
    answered: bool = False
    error: str | None = None
    children: list["QuestionNode"] = field(default_factory=list)
    recommendations: list[str] = field(default_factory=list)
    recommendations_stale: bool = True


@dataclass
class QuestionBoard:
    id: str
    selected_text: str
    threads: list[QuestionNode] = field(default_factory=list)
    collapsed: bool = False
    recommendations: list[str] = field(default_factory=list)
    degraded: bool = False


class BoardStore:
    """Per-session question boards; nodes form trees under board threads."""

    def __init__(self):
        self._boards: dict[str, QuestionBoard] = {}
        self._next_board = 1
        self._next_node = 1

    def boards(self) -> list[QuestionBoard]:
        return list(self._boards.values())

    def get(self, board_id: str) -> QuestionBoard:
        if board_id not in self._boards:
            raise NotFoundError(f"unknown board id: {board_id!r}")
        return self._boards[board_id]

    def _nodes(self, board: QuestionBoard):
        stack = list(board.threads)
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)

    def find_node(self, board_id: str, node_id: str) -> QuestionNode:
        for node in self._nodes(self.get(board_id)):
            if node.id == node_id:
                return node
        raise NotFoundError(f"unknown node id: {node_id!r}")

    def create(self, selected_text: str,
               provider: ChatProvider | None = None) -> QuestionBoard:
        if not selected_text.strip():
            raise ValidationError("selected text must be non-empty")
        board = QuestionBoard(f"b{self._next_board}", selected_text)
        self._next_board += 1
        if provider is not None:
            board.recommendations, board.degraded = recommend_questions(
                selected_text, provider
            )
        self._boards[board.id] = board
        return board

    def branch(self, board_id: str, parent_id: str, question: str,
               origin: str = "user") -> QuestionNode:
        """Append an unanswered question under a parent node."""
        question = question.strip()
        if not question:
            raise ValidationError("question must be non-empty")
        parent = self.find_node(board_id, parent_id)
        node = QuestionNode(f"q{self._next_node}", question, origin)
        self._next_node += 1
        parent.children.append(node)
        return node

    def ask(self, board_id: str, provider: ChatProvider,
            question: str | None = None, parent_id: str | None = None,
            node_id: str | None = None) -> QuestionNode:
        """Answer a question on the board.

        Either pass a question (optionally under a parent node) to create
        and answer a new node, or a node_id to answer an existing one, e.g.
        a branched or previously failed node.
        """
        board = self.get(board_id)
        if node_id is not None:
            node = self.find_node(board_id, node_id)
        else:
            text = (question or "").strip()
            if not text:
                raise ValidationError("question must be non-empty")
            parent = None
            if parent_id is not None:
                parent = self.find_node(board_id, parent_id)
            suggested = board.recommendations if parent is None else parent.recommendations
            origin = "recommended" if text in suggested else "user"
            node = QuestionNode(f"q{self._next_node}", text, origin)
            self._next_node += 1
            if parent is None:
                board.threads.append(node)
            else:
                parent.children.append(node)
        try:
            node.answer = answer(node.question, provider)
        except ProviderError as exc:
            node.error = str(exc)
            node.answered = False
            raise
        node.error = None
        node.answered = True
        node.recommendations_stale = True
        return node

    def follow_ups(self, board_id: str, node_id: str,
                   provider: ChatProvider) -> list[str]:
        """Recommendations for follow-up questions after a node's answer."""
        board = self.get(board_id)
        node = self.find_node(board_id, node_id)
        questions, _ = recommend_questions(
            board.selected_text, provider, context=node.answer or None
        )
        node.recommendations = questions
        node.recommendations_stale = False
        return questions

    def edit_answer(self, board_id: str, node_id: str, text: str) -> QuestionNode:
        node = self.find_node(board_id, node_id)
        node.answer = text
        node.answered = True
        node.recommendations_stale = True
        return node

    def set_collapsed(self, board_id: str, collapsed: bool) -> QuestionBoard:
        board = self.get(board_id)
        board.collapsed = collapsed
        return board

    # -- persistence ------------------------------------------------------

    def to_payload(self) -> dict:
        def node_payload(node: QuestionNode) -> dict:
            return {
                "id": node.id,
                "question": node.question,
                "origin": node.origin,
                "answer": node.answer,
                "answered": node.answered,
                "error": node.error,
                "recommendations": list(node.recommendations),
                "recommendations_stale": node.recommendations_stale,
                "children": [node_payload(c) for c in node.children],
            }

        return {
            "next_board": self._next_board,
            "next_node": self._next_node,
            "boards": [
                {
                    "id": b.id,
                    "selected_text": b.selected_text,
                    "collapsed": b.collapsed,
                    "recommendations": list(b.recommendations),
                    "degraded": b.degraded,
                    "threads": [node_payload(t) for t in b.threads],
                }
                for b in self._boards.values()
            ],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "BoardStore":
        def node_from(row: dict) -> QuestionNode:
            return QuestionNode(
                id=row["id"],
                question=row["question"],
                origin=row["origin"],
                answer=row.get("answer", ""),
                answered=row.get("answered", False),
                error=row.get("error"),
                children=[node_from(c) for c in row.get("children", [])],
                recommendations=list(row.get("recommendations", [])),
                recommendations_stale=row.get("recommendations_stale", True),
            )

        store = cls()
        store._next_board = payload.get("next_board", 1)
        store._next_node = payload.get("next_node", 1)
        for row in payload.get("boards", []):
            board = QuestionBoard(
                id=row["id"],
                selected_text=row["selected_text"],
                threads=[node_from(t) for t in row.get("threads", [])],
                collapsed=row.get("collapsed", False),
                recommendations=list(row.get("recommendations", [])),
                degraded=row.get("degraded", False),
            )
            store._boards[board.id] = board
        return store
