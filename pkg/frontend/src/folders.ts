// Right panel, first half: per-color highlight folders with the three tabs
// (Collection, Summary, Mind Map), inline summary editing, node additions.

import type {
  FolderPayload,
  MindMapNodePayload,
  MindMapPayload,
  SummarySection,
} from "./types.js";

export type FolderTab = "collection" | "summary" | "mindmap";

export interface FolderHandlers {
  onSelectColor(color: string): void;
  onSelectTab(tab: FolderTab): void;
  onNavigate(highlightId: string): void;
  onSummarize(color: string): void;
  onSaveSummary(color: string, title: string, sections: SummarySection[]): void;
  onAddMindmapNode(color: string, parentId: string, label: string): void;
}

export class FoldersPanel {
  activeTab: FolderTab = "collection";
  private editing = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly palette: string[],
    private readonly handlers: FolderHandlers,
  ) {
    this.root.classList.add("folders-panel");
  }

  render(folder: FolderPayload, mindmap: MindMapPayload | null): void {
    this.root.innerHTML = "";
    this.root.appendChild(this.renderHeader(folder.color));
    switch (this.activeTab) {
      case "collection":
        this.root.appendChild(this.renderCollection(folder));
        break;
      case "summary":
        this.root.appendChild(this.renderSummary(folder));
        break;
      case "mindmap":
        this.root.appendChild(this.renderMindmap(folder.color, mindmap));
        break;
    }
  }

  private renderHeader(activeColor: string): HTMLElement {
    const header = document.createElement("div");
    header.className = "folder-header";

    const swatches = document.createElement("div");
    swatches.className = "swatches";
    for (const color of this.palette) {
      const swatch = document.createElement("button");
      swatch.className = `swatch hl-${color}` + (color === activeColor ? " active" : "");
      swatch.dataset.color = color;
      swatch.addEventListener("click", () => this.handlers.onSelectColor(color));
      swatches.appendChild(swatch);
    }
    header.appendChild(swatches);

    const tabs = document.createElement("div");
    tabs.className = "tabs";
    const names: [FolderTab, string][] = [
      ["collection", "Collection"],
      ["summary", "Summary"],
      ["mindmap", "Mind Map"],
    ];
    for (const [tab, label] of names) {
      const button = document.createElement("button");
      button.className = "tab" + (tab === this.activeTab ? " active" : "");
      button.dataset.tab = tab;
      button.textContent = label;
      button.addEventListener("click", () => {
        this.activeTab = tab;
        this.editing = false;
        this.handlers.onSelectTab(tab);
      });
      tabs.appendChild(button);
    }
    header.appendChild(tabs);
    return header;
  }

  // -- collection --------------------------------------------------------

  private renderCollection(folder: FolderPayload): HTMLElement {
    const list = document.createElement("ul");
    list.className = "collection";
    for (const entry of folder.entries) {
      const item = document.createElement("li");
      item.className = "entry";
      item.dataset.highlight = entry.id;

      const dot = document.createElement("span");
      dot.className = `dot hl-${entry.color}`;
      item.appendChild(dot);

      const quote = document.createElement("blockquote");
      quote.textContent = entry.edited_text ?? entry.exact_text;
      item.appendChild(quote);

      const go = document.createElement("button");
      go.className = "navigate";
      go.textContent = "Go to source";
      go.addEventListener("click", () => this.handlers.onNavigate(entry.id));
      item.appendChild(go);
      list.appendChild(item);
    }
    return list;
  }

  // -- summary -----------------------------------------------------------

  private renderSummary(folder: FolderPayload): HTMLElement {
    const box = document.createElement("div");
    box.className = "summary";

    const summarize = document.createElement("button");
    summarize.className = "summarize";
    summarize.textContent = folder.summary ? "Summarize again" : "Summarize";
    summarize.addEventListener("click", () => this.handlers.onSummarize(folder.color));
    box.appendChild(summarize);

    if (!folder.summary) {
      const empty = document.createElement("p");
      empty.className = "summary-empty";
      empty.textContent = "No summary yet.";
      box.appendChild(empty);
      return box;
    }
    if (folder.summary_stale) {
      const badge = document.createElement("span");
      badge.className = "stale-badge";
      badge.textContent = "outdated";
      box.appendChild(badge);
    }
    if (this.editing) {
      box.appendChild(this.renderSummaryEditor(folder));
      return box;
    }

    const title = document.createElement("h3");
    title.className = "summary-title";
    title.textContent = folder.summary.title;
    box.appendChild(title);
    for (const section of folder.summary.sections) {
      const article = document.createElement("article");
      article.className = "section";
      const heading = document.createElement("h4");
      heading.textContent = section.subtitle;
      const content = document.createElement("p");
      content.textContent = section.content;
      article.appendChild(heading);
      article.appendChild(content);
      box.appendChild(article);
    }

    const edit = document.createElement("button");
    edit.className = "edit-summary";
    edit.textContent = "Edit";
    edit.addEventListener("click", () => {
      this.editing = true;
      this.render(folder, null);
    });
    box.appendChild(edit);
    return box;
  }

  private renderSummaryEditor(folder: FolderPayload): HTMLElement {
    const summary = folder.summary!;
    const form = document.createElement("div");
    form.className = "summary-editor";

    const title = document.createElement("input");
    title.className = "title-input";
    title.value = summary.title;
    form.appendChild(title);

    const areas: [HTMLInputElement, HTMLTextAreaElement][] = [];
    for (const section of summary.sections) {
      const subtitle = document.createElement("input");
      subtitle.className = "subtitle-input";
      subtitle.value = section.subtitle;
      const content = document.createElement("textarea");
      content.className = "content-input";
      content.value = section.content;
      form.appendChild(subtitle);
      form.appendChild(content);
      areas.push([subtitle, content]);
    }

    const save = document.createElement("button");
    save.className = "save-summary";
    save.textContent = "Save";
    save.addEventListener("click", () => {
      this.editing = false;
      this.handlers.onSaveSummary(
        folder.color,
        title.value,
        areas.map(([subtitle, content]) => ({
          subtitle: subtitle.value,
          content: content.value,
        })),
      );
    });
    form.appendChild(save);
    return form;
  }

  // -- mind map ----------------------------------------------------------

  private renderMindmap(color: string, mindmap: MindMapPayload | null): HTMLElement {
    const box = document.createElement("div");
    box.className = "mindmap";
    if (!mindmap) {
      const empty = document.createElement("p");
      empty.className = "mindmap-empty";
      empty.textContent = "Summarize the folder to grow a mind map.";
      box.appendChild(empty);
      return box;
    }
    box.appendChild(this.renderMindmapNode(color, mindmap.root));
    return box;
  }

  private renderMindmapNode(color: string, node: MindMapNodePayload): HTMLElement {
    const item = document.createElement("div");
    item.className = `mm-node origin-${node.origin}`;
    item.dataset.node = node.id;

    const label = document.createElement("span");
    label.className = "label";
    label.textContent = node.label;
    item.appendChild(label);

    const add = document.createElement("button");
    add.className = "add-child";
    add.textContent = "+";
    add.addEventListener("click", () => {
      const input = document.createElement("input");
      input.className = "node-input";
      const confirm = document.createElement("button");
      confirm.className = "confirm-node";
      confirm.textContent = "Add";
      confirm.addEventListener("click", () =>
        this.handlers.onAddMindmapNode(color, node.id, input.value),
      );
      item.appendChild(input);
      item.appendChild(confirm);
    });
    item.appendChild(add);

    if (node.children.length) {
      const children = document.createElement("div");
      children.className = "mm-children";
      for (const child of node.children) {
        children.appendChild(this.renderMindmapNode(color, child));
      }
      item.appendChild(children);
    }
    return item;
  }
}
