// Middle panel: the opened thread with inline highlight marks, a selection
// popup for highlight/question actions, and comment scroll targets.

import { segmentBody } from "./segments.js";
import type {
  CommentPayload,
  HighlightPayload,
  PostDetailPayload,
} from "./types.js";

export interface DetailHandlers {
  onHighlight(
    target: string,
    start: number,
    end: number,
    text: string,
    color: string,
  ): void;
  onClear(highlightId: string): void;
  onRecolor(highlightId: string, color: string): void;
  onQuestion(selectedText: string): void;
}

const FLASH_MS = 1200;

export class DetailPanel {
  private detail: PostDetailPayload | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly palette: string[],
    private readonly handlers: DetailHandlers,
  ) {
    this.root.classList.add("detail-panel");
  }

  render(detail: PostDetailPayload): void {
    this.detail = detail;
    this.root.innerHTML = "";

    const title = document.createElement("h2");
    title.className = "post-title";
    title.textContent = detail.post.title;
    this.root.appendChild(title);
    this.root.appendChild(this.labelChips(detail.post.labels));
    this.root.appendChild(
      this.renderBody(detail.post.id, detail.post.body, detail.highlights),
    );

    const comments = document.createElement("div");
    comments.className = "comments";
    for (const comment of detail.comments) {
      comments.appendChild(this.renderComment(comment, detail.highlights));
    }
    this.root.appendChild(comments);
  }

  private labelChips(labels: { emotional: string; informational: string }): HTMLElement {
    const box = document.createElement("div");
    box.className = "labels";
    for (const kind of ["emotional", "informational"] as const) {
      const chip = document.createElement("span");
      chip.className = `chip chip-${kind} level-${labels[kind]}`;
      chip.textContent = `${kind}: ${labels[kind]}`;
      box.appendChild(chip);
    }
    return box;
  }

  private renderComment(
    comment: CommentPayload,
    highlights: HighlightPayload[],
  ): HTMLElement {
    const box = document.createElement("div");
    box.className = "comment";
    box.dataset.comment = comment.id;
    box.style.marginLeft = `${comment.depth * 16}px`;
    box.appendChild(this.labelChips(comment.labels));
    box.appendChild(this.renderBody(comment.id, comment.body, highlights));
    return box;
  }

  private renderBody(
    target: string,
    body: string,
    highlights: HighlightPayload[],
  ): HTMLElement {
    const paragraph = document.createElement("p");
    paragraph.className = "body-text";
    paragraph.dataset.target = target;
    for (const segment of segmentBody(body, highlights, target)) {
      if (segment.covering.length === 0) {
        paragraph.appendChild(document.createTextNode(segment.text));
        continue;
      }
      const mark = document.createElement("mark");
      mark.className = segment.covering.map((h) => `hl-${h.color}`).join(" ");
      mark.dataset.highlights = segment.covering.map((h) => h.id).join(" ");
      mark.textContent = segment.text;
      const first = segment.covering[0];
      mark.addEventListener("click", (event) => {
        event.stopPropagation();
        this.showHighlightMenu(mark, first);
      });
      paragraph.appendChild(mark);
    }
    return paragraph;
  }

  // -- popups ------------------------------------------------------------

  /** Popup offered after selecting plain text. */
  showSelectionMenu(target: string, start: number, end: number, text: string): void {
    const popup = this.freshPopup();
    for (const color of this.palette) {
      const button = document.createElement("button");
      button.className = `color color-${color}`;
      button.textContent = color;
      button.addEventListener("click", () => {
        this.closePopup();
        this.handlers.onHighlight(target, start, end, text, color);
      });
      popup.appendChild(button);
    }
    popup.appendChild(this.questionButton(text));
  }

  /** Popup offered on an existing highlight mark. */
  showHighlightMenu(anchorEl: HTMLElement, highlight: HighlightPayload): void {
    const popup = this.freshPopup();
    popup.dataset.highlight = highlight.id;

    const clear = document.createElement("button");
    clear.className = "clear";
    clear.textContent = "Clear";
    clear.addEventListener("click", () => {
      this.closePopup();
      this.handlers.onClear(highlight.id);
    });
    popup.appendChild(clear);

    for (const color of this.palette) {
      if (color === highlight.color) continue;
      const button = document.createElement("button");
      button.className = `recolor color-${color}`;
      button.textContent = color;
      button.addEventListener("click", () => {
        this.closePopup();
        this.handlers.onRecolor(highlight.id, color);
      });
      popup.appendChild(button);
    }
    popup.appendChild(
      this.questionButton(highlight.edited_text ?? highlight.exact_text),
    );
    anchorEl.classList.add("menu-open");
  }

  private questionButton(text: string): HTMLElement {
    const button = document.createElement("button");
    button.className = "question";
    button.textContent = "Question";
    button.addEventListener("click", () => {
      this.closePopup();
      this.handlers.onQuestion(text);
    });
    return button;
  }

  private freshPopup(): HTMLElement {
    this.closePopup();
    const popup = document.createElement("div");
    popup.className = "selection-popup";
    this.root.appendChild(popup);
    return popup;
  }

  closePopup(): void {
    this.root.querySelectorAll(".selection-popup").forEach((el) => el.remove());
    this.root.querySelectorAll(".menu-open").forEach((el) =>
      el.classList.remove("menu-open"),
    );
  }

  // -- navigation --------------------------------------------------------

  scrollToComment(commentId: string): void {
    const el = this.root.querySelector<HTMLElement>(
      `.comment[data-comment="${commentId}"]`,
    );
    if (el) this.reveal(el);
  }

  /** Scroll to and flash the mark belonging to a highlight. */
  flashHighlight(highlightId: string): void {
    const marks = this.root.querySelectorAll<HTMLElement>("mark[data-highlights]");
    for (const mark of marks) {
      const ids = (mark.dataset.highlights ?? "").split(" ");
      if (ids.includes(highlightId)) {
        this.reveal(mark);
        return;
      }
    }
  }

  private reveal(el: HTMLElement): void {
    el.scrollIntoView?.({ block: "center" });
    el.classList.add("flash");
    setTimeout(() => el.classList.remove("flash"), FLASH_MS);
  }

  get current(): PostDetailPayload | null {
    return this.detail;
  }
}
