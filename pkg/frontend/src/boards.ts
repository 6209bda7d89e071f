// Right panel, second half: questioning boards. Follow-ups continue a
// vertical chain; siblings fan out as horizontal parallel branches.

import type { BoardNodePayload, BoardPayload } from "./types.js";

export interface BoardHandlers {
  onAsk(boardId: string, question: string, parentId?: string): void;
  onAnswerNode(boardId: string, nodeId: string): void;
  onBranch(boardId: string, parentId: string, question: string): void;
  onFollowUps(boardId: string, nodeId: string): void;
  onCollapse(boardId: string, collapsed: boolean): void;
}

export class BoardsPanel {
  constructor(
    private readonly root: HTMLElement,
    private readonly handlers: BoardHandlers,
  ) {
    this.root.classList.add("boards-panel");
  }

  render(board: BoardPayload | null): void {
    this.root.innerHTML = "";
    if (!board) {
      const empty = document.createElement("p");
      empty.className = "board-empty";
      empty.textContent = "Select text and press Question to open a board.";
      this.root.appendChild(empty);
      return;
    }

    const box = document.createElement("div");
    box.className = "board" + (board.collapsed ? " collapsed" : "");
    box.dataset.board = board.id;

    const header = document.createElement("div");
    header.className = "board-header";
    const selected = document.createElement("span");
    selected.className = "selected-text";
    selected.textContent = board.selected_text;
    header.appendChild(selected);
    const toggle = document.createElement("button");
    toggle.className = "collapse-toggle";
    toggle.textContent = board.collapsed ? "expand" : "collapse";
    toggle.addEventListener("click", () =>
      this.handlers.onCollapse(board.id, !board.collapsed),
    );
    header.appendChild(toggle);
    box.appendChild(header);

    // Collapsed boards show only the selected text.
    if (!board.collapsed) {
      box.appendChild(this.renderRecommendations(board));
      const threads = document.createElement("div");
      threads.className = "threads";
      for (const thread of board.threads) {
        threads.appendChild(this.renderChain(board, thread));
      }
      box.appendChild(threads);
      box.appendChild(this.renderAskForm(board));
    }
    this.root.appendChild(box);
  }

  private renderRecommendations(board: BoardPayload): HTMLElement {
    const list = document.createElement("div");
    list.className = "recommendations" + (board.degraded ? " degraded" : "");
    for (const question of board.recommendations) {
      const button = document.createElement("button");
      button.className = "recommend";
      button.textContent = question;
      button.addEventListener("click", () => this.handlers.onAsk(board.id, question));
      list.appendChild(button);
    }
    return list;
  }

  /** A node plus its single-child descendants, stacked vertically. */
  private renderChain(board: BoardPayload, node: BoardNodePayload): HTMLElement {
    const chain = document.createElement("div");
    chain.className = "chain";
    let current: BoardNodePayload | null = node;
    while (current) {
      chain.appendChild(this.renderNode(board, current));
      if (current.children.length === 1) {
        current = current.children[0];
      } else if (current.children.length > 1) {
        const branches = document.createElement("div");
        branches.className = "branches";
        for (const child of current.children) {
          branches.appendChild(this.renderChain(board, child));
        }
        chain.appendChild(branches);
        current = null;
      } else {
        current = null;
      }
    }
    return chain;
  }

  private renderNode(board: BoardPayload, node: BoardNodePayload): HTMLElement {
    const card = document.createElement("div");
    card.className =
      `qnode origin-${node.origin}` + (node.answered ? "" : " unanswered");
    card.dataset.node = node.id;

    const question = document.createElement("p");
    question.className = "question";
    question.textContent = node.question;
    card.appendChild(question);

    if (node.error) {
      const error = document.createElement("p");
      error.className = "node-error";
      error.textContent = node.error;
      card.appendChild(error);
    }
    if (node.answered) {
      const answer = document.createElement("p");
      answer.className = "answer";
      answer.textContent = node.answer;
      card.appendChild(answer);
    } else {
      const retry = document.createElement("button");
      retry.className = "answer-now";
      retry.textContent = "Answer";
      retry.addEventListener("click", () =>
        this.handlers.onAnswerNode(board.id, node.id),
      );
      card.appendChild(retry);
    }

    // The grey dot sprouts a parallel branch under this node.
    const dot = document.createElement("button");
    dot.className = "branch-dot";
    dot.title = "Branch a follow-up";
    dot.addEventListener("click", () => this.handlers.onFollowUps(board.id, node.id));
    card.appendChild(dot);

    if (node.recommendations.length) {
      const follow = document.createElement("div");
      follow.className =
        "followups" + (node.recommendations_stale ? " stale" : "");
      for (const question of node.recommendations) {
        const button = document.createElement("button");
        button.className = "followup";
        button.textContent = question;
        button.addEventListener("click", () =>
          this.handlers.onBranch(board.id, node.id, question),
        );
        follow.appendChild(button);
      }
      card.appendChild(follow);
    }
    return card;
  }

  private renderAskForm(board: BoardPayload): HTMLElement {
    const form = document.createElement("div");
    form.className = "ask-form";
    const input = document.createElement("input");
    input.className = "ask-input";
    input.placeholder = "Ask your own question";
    const send = document.createElement("button");
    send.className = "ask-send";
    send.textContent = "Ask";
    send.addEventListener("click", () => {
      if (input.value.trim()) this.handlers.onAsk(board.id, input.value);
    });
    form.appendChild(input);
    form.appendChild(send);
    return form;
  }
}
