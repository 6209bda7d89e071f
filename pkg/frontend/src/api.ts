import type {
  BoardNodePayload,
  BoardPayload,
  FilterSelection,
  FolderPayload,
  HighlightPayload,
  JobTicket,
  MindMapNodePayload,
  MindMapPayload,
  NavigatePayload,
  PostDetailPayload,
  SessionInfo,
  SummarySection,
  ViewPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface ErrorEnvelope {
  error?: { code?: string; message?: string };
}

/** Thin typed wrapper over the JSON API; one instance per browser session. */
export class ApiClient {
  token = "";
  palette: string[] = [];
  pollIntervalMs = 150;

  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    params?: Record<string, string>,
  ): Promise<T> {
    let url = this.baseUrl + path;
    if (params) {
      url += "?" + new URLSearchParams(params).toString();
    }
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(url, init);
    const payload = (await response.json()) as T & ErrorEnvelope;
    if (!response.ok) {
      const err = payload.error ?? {};
      throw new ApiError(
        err.code ?? "internal",
        err.message ?? `request failed with ${response.status}`,
        response.status,
      );
    }
    return payload;
  }

  private get<T>(path: string, params: Record<string, string> = {}): Promise<T> {
    return this.request<T>("GET", path, undefined, { ...params, session: this.token });
  }

  private post<T>(path: string, body: Record<string, unknown> = {}): Promise<T> {
    return this.request<T>("POST", path, { ...body, session: this.token });
  }

  /** Submit a long-running call, then poll its job until it settles. */
  private async job<T>(path: string, body: Record<string, unknown>): Promise<T> {
    const submitted = await this.post<JobTicket>(path, body);
    // The submit response carries no result or error details, only the job
    // id, so always read the job endpoint at least once.
    let ticket = await this.request<JobTicket>("GET", `/api/job/${submitted.job}`);
    while (ticket.status === "pending") {
      await new Promise((resolve) => setTimeout(resolve, this.pollIntervalMs));
      ticket = await this.request<JobTicket>("GET", `/api/job/${ticket.job}`);
    }
    if (ticket.status === "error") {
      const err = ticket.error ?? { code: "internal", message: "job failed" };
      throw new ApiError(err.code, err.message, 0);
    }
    return ticket.result as T;
  }

  async openSession(): Promise<SessionInfo> {
    const info = await this.request<SessionInfo>("POST", "/api/session");
    this.token = info.session;
    this.palette = info.palette;
    return info;
  }

  search(query: string): Promise<ViewPayload> {
    return this.get("/api/search", { q: query });
  }

  zoom(path: string[]): Promise<ViewPayload> {
    return this.post("/api/zoom", { path });
  }

  filter(selections: FilterSelection[]): Promise<ViewPayload> {
    return this.post("/api/filter", { selections });
  }

  postDetail(postId: string): Promise<PostDetailPayload> {
    return this.get(`/api/post/${postId}`);
  }

  async addHighlight(
    target: string,
    charStart: number,
    charEnd: number,
    exactText: string,
    color: string,
  ): Promise<HighlightPayload> {
    const out = await this.post<{ highlight: HighlightPayload }>("/api/highlight", {
      target,
      char_start: charStart,
      char_end: charEnd,
      exact_text: exactText,
      color,
    });
    return out.highlight;
  }

  async recolorHighlight(id: string, color: string): Promise<HighlightPayload> {
    const out = await this.post<{ highlight: HighlightPayload }>(
      `/api/highlight/${id}/recolor`,
      { color },
    );
    return out.highlight;
  }

  async clearHighlight(id: string): Promise<string> {
    const out = await this.request<{ cleared: string }>(
      "DELETE",
      `/api/highlight/${id}`,
      undefined,
      { session: this.token },
    );
    return out.cleared;
  }

  async editHighlight(id: string, text: string): Promise<HighlightPayload> {
    const out = await this.post<{ highlight: HighlightPayload }>(
      `/api/highlight/${id}/edit`,
      { text },
    );
    return out.highlight;
  }

  navigate(id: string): Promise<NavigatePayload> {
    return this.get(`/api/highlight/${id}/navigate`);
  }

  folder(color: string): Promise<FolderPayload> {
    return this.get(`/api/folder/${color}`);
  }

  summarize(color: string): Promise<FolderPayload> {
    return this.job(`/api/folder/${color}/summarize`, {});
  }

  editSummary(
    color: string,
    title: string,
    sections: SummarySection[],
  ): Promise<FolderPayload> {
    return this.request("PUT", `/api/folder/${color}/summary`, {
      session: this.token,
      title,
      sections,
    });
  }

  mindmap(color: string): Promise<MindMapPayload> {
    return this.get(`/api/mindmap/${color}`);
  }

  addMindmapNode(
    color: string,
    parentId: string,
    label: string,
  ): Promise<{ node: MindMapNodePayload; root: MindMapNodePayload }> {
    return this.post(`/api/mindmap/${color}/node`, {
      parent_id: parentId,
      label,
    });
  }

  createBoard(selectedText: string): Promise<BoardPayload> {
    return this.job("/api/board", { selected_text: selectedText });
  }

  board(id: string): Promise<BoardPayload> {
    return this.get(`/api/board/${id}`);
  }

  ask(
    boardId: string,
    opts: { question?: string; parentId?: string; nodeId?: string },
  ): Promise<{ board: string; node: BoardNodePayload }> {
    const body: Record<string, unknown> = {};
    if (opts.question !== undefined) body.question = opts.question;
    if (opts.parentId !== undefined) body.parent_id = opts.parentId;
    if (opts.nodeId !== undefined) body.node_id = opts.nodeId;
    return this.job(`/api/board/${boardId}/ask`, body);
  }

  branch(
    boardId: string,
    parentId: string,
    question: string,
  ): Promise<{ board: string; node: BoardNodePayload }> {
    return this.post(`/api/board/${boardId}/branch`, {
      parent_id: parentId,
      question,
    });
  }

  followUps(boardId: string, nodeId: string): Promise<{ recommendations: string[] }> {
    return this.job(`/api/board/${boardId}/followups`, { node_id: nodeId });
  }

  collapseBoard(id: string, collapsed: boolean): Promise<BoardPayload> {
    return this.post(`/api/board/${id}/collapse`, { collapsed });
  }

  editAnswer(
    boardId: string,
    nodeId: string,
    text: string,
  ): Promise<{ node: BoardNodePayload }> {
    return this.request("PUT", `/api/board/${boardId}/node/${nodeId}/answer`, {
      session: this.token,
      text,
    });
  }
}
