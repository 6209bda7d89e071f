// Wires the three panels to the API client. Everything the panels draw is
// server state; the one optimistic update is a highlight recolor, which is
// rolled back if the call fails.

import { ApiClient, ApiError } from "./api.js";
import { BoardsPanel } from "./boards.js";
import { DetailPanel } from "./detail.js";
import { FoldersPanel } from "./folders.js";
import {
  Transform,
  Viewport,
  lerpTransform,
  overlayTransform,
  toCss,
  unitTransform,
  zoomTransform,
} from "./geometry.js";
import { PackView } from "./pack.js";
import type {
  FilterSelection,
  PostDetailPayload,
  TreeNode,
  ViewPayload,
} from "./types.js";

export interface AppOptions {
  viewport?: Viewport;
  /** Zoom transition length; 0 disables animation entirely. */
  animationMs?: number;
}

function findNode(node: TreeNode, ref: string): TreeNode | null {
  if (node.ref_id === ref) return node;
  for (const child of node.children) {
    const hit = findNode(child, ref);
    if (hit) return hit;
  }
  return null;
}

/** Character offset of (node, offset) within a rendered body paragraph. */
function offsetWithin(paragraph: HTMLElement, node: Node, offset: number): number {
  if (node === paragraph) {
    let acc = 0;
    for (let i = 0; i < offset; i++) {
      acc += paragraph.childNodes[i].textContent?.length ?? 0;
    }
    return acc;
  }
  let acc = 0;
  for (const child of Array.from(paragraph.childNodes)) {
    if (child === node || child.contains(node)) return acc + offset;
    acc += child.textContent?.length ?? 0;
  }
  return acc;
}

export class App {
  private readonly viewport: Viewport;
  private readonly animationMs: number;

  private pack!: PackView;
  private detail!: DetailPanel;
  private folders!: FoldersPanel;
  private boards!: BoardsPanel;

  private packRoot!: HTMLElement;
  private detailRoot!: HTMLElement;
  private statusEl!: HTMLElement;
  private searchInput!: HTMLInputElement;

  private view: ViewPayload | null = null;
  private activeColor = "";
  // Posts remember their comment ids so folder navigation can reopen them.
  private readonly targetPost = new Map<string, string>();

  private pendingOps = 0;
  private waiters: (() => void)[] = [];

  constructor(
    private readonly root: HTMLElement,
    readonly api: ApiClient,
    options: AppOptions = {},
  ) {
    this.viewport = options.viewport ?? { width: 640, height: 640 };
    this.animationMs = options.animationMs ?? 180;
  }

  async start(): Promise<void> {
    const info = await this.api.openSession();
    this.activeColor = info.palette[0] ?? "";
    this.buildShell();
    this.setStatus("ready");
    await this.refreshFolder();
  }

  /** Resolves once no event-handler-initiated API work is in flight. */
  settled(): Promise<void> {
    if (this.pendingOps === 0) return Promise.resolve();
    return new Promise((resolve) => this.waiters.push(resolve));
  }

  // -- shell ---------------------------------------------------------------

  private buildShell(): void {
    this.root.classList.add("app");
    this.root.innerHTML = "";

    const topbar = document.createElement("header");
    topbar.className = "topbar";
    const form = document.createElement("form");
    form.className = "search-form";
    this.searchInput = document.createElement("input");
    this.searchInput.className = "search-input";
    this.searchInput.placeholder = "Search posts";
    const go = document.createElement("button");
    go.className = "search-go";
    go.type = "submit";
    go.textContent = "Search";
    form.appendChild(this.searchInput);
    form.appendChild(go);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.search(this.searchInput.value);
    });
    topbar.appendChild(form);
    this.statusEl = document.createElement("span");
    this.statusEl.className = "status";
    topbar.appendChild(this.statusEl);
    this.root.appendChild(topbar);

    const panes = document.createElement("main");
    panes.className = "panes";
    this.packRoot = document.createElement("section");
    this.packRoot.className = "pane pane-pack";
    this.detailRoot = document.createElement("section");
    this.detailRoot.className = "pane pane-detail";
    const side = document.createElement("aside");
    side.className = "pane pane-side";
    const foldersRoot = document.createElement("div");
    const boardsRoot = document.createElement("div");
    side.appendChild(foldersRoot);
    side.appendChild(boardsRoot);
    panes.appendChild(this.packRoot);
    panes.appendChild(this.detailRoot);
    panes.appendChild(side);
    this.root.appendChild(panes);

    this.pack = new PackView(this.packRoot, {
      onZoomIn: (path) => void this.run(() => this.zoomIn(path)),
      onZoomOut: () => void this.run(() => this.zoomOut()),
      onToggleFilter: (selection) => void this.run(() => this.toggleFilter(selection)),
      onOpenPost: (postId) => void this.run(() => this.openPost(postId)),
      onOpenComment: (postId, commentId) =>
        void this.run(() => this.openComment(postId, commentId)),
    });
    this.detail = new DetailPanel(this.detailRoot, this.api.palette, {
      onHighlight: (target, start, end, text, color) =>
        void this.run(() => this.addHighlight(target, start, end, text, color)),
      onClear: (id) => void this.run(() => this.clearHighlight(id)),
      onRecolor: (id, color) => void this.run(() => this.recolorHighlight(id, color)),
      onQuestion: (text) => void this.run(() => this.openBoard(text)),
    });
    this.detailRoot.addEventListener("mouseup", () => this.captureSelection());
    this.folders = new FoldersPanel(foldersRoot, this.api.palette, {
      onSelectColor: (color) => {
        this.activeColor = color;
        void this.run(() => this.refreshFolder());
      },
      onSelectTab: () => void this.run(() => this.refreshFolder()),
      onNavigate: (id) => void this.run(() => this.navigateTo(id)),
      onSummarize: (color) => void this.run(() => this.summarize(color)),
      onSaveSummary: (color, title, sections) =>
        void this.run(async () => {
          await this.api.editSummary(color, title, sections);
          await this.refreshFolder();
        }),
      onAddMindmapNode: (color, parentId, label) =>
        void this.run(async () => {
          await this.api.addMindmapNode(color, parentId, label);
          await this.refreshFolder();
        }),
    });
    this.boards = new BoardsPanel(boardsRoot, {
      onAsk: (boardId, question) =>
        void this.run(async () => {
          await this.api.ask(boardId, { question });
          await this.refreshBoard(boardId);
        }),
      onAnswerNode: (boardId, nodeId) =>
        void this.run(async () => {
          await this.api.ask(boardId, { nodeId });
          await this.refreshBoard(boardId);
        }),
      onBranch: (boardId, parentId, question) =>
        void this.run(async () => {
          await this.api.branch(boardId, parentId, question);
          await this.refreshBoard(boardId);
        }),
      onFollowUps: (boardId, nodeId) =>
        void this.run(async () => {
          await this.api.followUps(boardId, nodeId);
          await this.refreshBoard(boardId);
        }),
      onCollapse: (boardId, collapsed) =>
        void this.run(async () => {
          this.boards.render(await this.api.collapseBoard(boardId, collapsed));
        }),
    });
    this.boards.render(null);
  }

  private setStatus(text: string, isError = false): void {
    this.statusEl.textContent = text;
    this.statusEl.className = "status" + (isError ? " error" : "");
  }

  private async run(fn: () => Promise<void>): Promise<void> {
    this.pendingOps++;
    try {
      await fn();
    } catch (err) {
      if (err instanceof ApiError) {
        this.setStatus(err.message, true);
      } else {
        throw err;
      }
    } finally {
      this.pendingOps--;
      if (this.pendingOps === 0) {
        const waiting = this.waiters;
        this.waiters = [];
        waiting.forEach((wake) => wake());
      }
    }
  }

  // -- exploration ---------------------------------------------------------

  search(query: string): Promise<void> {
    return this.run(async () => {
      const view = await this.api.search(query);
      this.view = view;
      this.pack.render(view, this.viewport);
      this.setStatus(`${view.post_list.length} matching posts`);
    });
  }

  private async zoomIn(path: string[]): Promise<void> {
    const entered =
      this.view && findNode(this.view.tree, path[path.length - 1]);
    const view = await this.api.zoom(path);
    const svg = this.packRoot.querySelector<SVGSVGElement>("svg.pack-canvas");
    if (entered && svg) {
      const base = unitTransform(this.viewport);
      await this.animate(
        svg,
        base,
        zoomTransform(base, entered.x, entered.y, entered.r),
      );
    }
    this.view = view;
    this.pack.render(view, this.viewport);
  }

  private async zoomOut(): Promise<void> {
    if (!this.view || this.view.path.length === 0) return;
    const leavingRef = this.view.path[this.view.path.length - 1];
    const view = await this.api.zoom(this.view.path.slice(0, -1));
    this.view = view;
    this.pack.render(view, this.viewport);
    const child = findNode(view.tree, leavingRef);
    const svg = this.packRoot.querySelector<SVGSVGElement>("svg.pack-canvas");
    if (child && svg) {
      const base = unitTransform(this.viewport);
      await this.animate(
        svg,
        zoomTransform(base, child.x, child.y, child.r),
        base,
      );
    }
  }

  /** CSS-only transition between two placements of the same server layout. */
  private animate(
    svg: SVGSVGElement,
    from: Transform,
    to: Transform,
  ): Promise<void> {
    if (this.animationMs <= 0 || typeof requestAnimationFrame !== "function") {
      return Promise.resolve();
    }
    const base = unitTransform(this.viewport);
    svg.style.transformOrigin = "0 0";
    const started = Date.now();
    return new Promise((resolve) => {
      const step = () => {
        const t = (Date.now() - started) / this.animationMs;
        svg.style.transform = toCss(
          overlayTransform(base, lerpTransform(from, to, t)),
        );
        if (t < 1) {
          requestAnimationFrame(step);
        } else {
          svg.style.transform = "";
          resolve();
        }
      };
      step();
    });
  }

  private async toggleFilter(selection: FilterSelection): Promise<void> {
    if (!this.view) return;
    const key = selection.join(":");
    const current = this.view.filter;
    const next = current.some((s) => s.join(":") === key)
      ? current.filter((s) => s.join(":") !== key)
      : [...current, selection];
    const view = await this.api.filter(next as FilterSelection[]);
    this.view = view;
    this.pack.render(view, this.viewport);
  }

  // -- thread detail -------------------------------------------------------

  private async openPost(postId: string): Promise<void> {
    const detail = await this.api.postDetail(postId);
    this.rememberTargets(detail);
    this.detail.render(detail);
  }

  private async openComment(postId: string, commentId: string): Promise<void> {
    await this.openPost(postId);
    this.detail.scrollToComment(commentId);
  }

  private rememberTargets(detail: PostDetailPayload): void {
    this.targetPost.set(detail.post.id, detail.post.id);
    for (const comment of detail.comments) {
      this.targetPost.set(comment.id, detail.post.id);
    }
  }

  private async refreshDetail(): Promise<void> {
    const current = this.detail.current;
    if (current) await this.openPost(current.post.id);
  }

  private bodyOf(target: string): string | null {
    const current = this.detail.current;
    if (!current) return null;
    if (current.post.id === target) return current.post.body;
    return current.comments.find((c) => c.id === target)?.body ?? null;
  }

  /** Map a browser text selection back to body offsets, then offer colors. */
  private captureSelection(): void {
    const selection = document.getSelection?.();
    if (!selection || selection.isCollapsed || !selection.anchorNode) return;
    const anchor =
      selection.anchorNode instanceof HTMLElement
        ? selection.anchorNode
        : selection.anchorNode.parentElement;
    const paragraph = anchor?.closest<HTMLElement>(".body-text[data-target]");
    if (!paragraph || !selection.focusNode) return;
    const a = offsetWithin(paragraph, selection.anchorNode, selection.anchorOffset);
    const b = offsetWithin(paragraph, selection.focusNode, selection.focusOffset);
    this.openSelectionMenu(
      paragraph.dataset.target ?? "",
      Math.min(a, b),
      Math.max(a, b),
    );
  }

  /** Offer the highlight/question popup for a span of an open body. */
  openSelectionMenu(target: string, start: number, end: number): void {
    const body = this.bodyOf(target);
    if (body === null || start >= end) return;
    this.detail.showSelectionMenu(target, start, end, body.slice(start, end));
  }

  // -- highlights ----------------------------------------------------------

  private async addHighlight(
    target: string,
    start: number,
    end: number,
    text: string,
    color: string,
  ): Promise<void> {
    await this.api.addHighlight(target, start, end, text, color);
    await this.refreshDetail();
    await this.refreshFolder();
  }

  private async clearHighlight(id: string): Promise<void> {
    await this.api.clearHighlight(id);
    await this.refreshDetail();
    await this.refreshFolder();
  }

  private async recolorHighlight(id: string, color: string): Promise<void> {
    const current = this.detail.current;
    if (!current) return;
    // Optimistic: repaint at once, put the old colors back if the call fails.
    const previous = current.highlights.map((h) => ({ ...h }));
    const mine = current.highlights.find((h) => h.id === id);
    if (mine) {
      mine.color = color;
      this.detail.render(current);
    }
    try {
      await this.api.recolorHighlight(id, color);
    } catch (err) {
      if (err instanceof ApiError) {
        current.highlights = previous;
        this.detail.render(current);
      }
      throw err;
    }
    await this.refreshDetail();
    await this.refreshFolder();
  }

  private async navigateTo(highlightId: string): Promise<void> {
    const where = await this.api.navigate(highlightId);
    // Comment targets are reachable only if their post was opened before;
    // the server does not expose a comment-to-post lookup.
    const postId = this.targetPost.get(where.target) ?? where.target;
    await this.openPost(postId);
    this.detail.flashHighlight(highlightId);
  }

  // -- folders -------------------------------------------------------------

  private async refreshFolder(): Promise<void> {
    if (!this.activeColor) return;
    const folder = await this.api.folder(this.activeColor);
    if (this.folders.activeTab !== "mindmap") {
      this.folders.render(folder, null);
      return;
    }
    const mindmap = await this.api.mindmap(this.activeColor);
    const bare = mindmap.root.label === "" && mindmap.root.children.length === 0;
    this.folders.render(folder, bare ? null : mindmap);
  }

  private async summarize(color: string): Promise<void> {
    this.setStatus("summarizing...");
    const folder = await this.api.summarize(color);
    if (this.folders.activeTab === "mindmap") {
      await this.refreshFolder();
    } else {
      this.folders.render(folder, null);
    }
    this.setStatus("summary ready");
  }

  // -- boards --------------------------------------------------------------

  private async openBoard(selectedText: string): Promise<void> {
    this.setStatus("opening board...");
    const board = await this.api.createBoard(selectedText);
    this.boards.render(board);
    this.setStatus("board ready");
  }

  private async refreshBoard(boardId: string): Promise<void> {
    this.boards.render(await this.api.board(boardId));
  }
}
