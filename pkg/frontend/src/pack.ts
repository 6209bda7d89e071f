// Left panel: packed circles, support histograms as clickable filter bars,
// and the ranked post list.

import {
  Transform,
  Viewport,
  applyPoint,
  applyRadius,
  unitTransform,
} from "./geometry.js";
import type {
  Direction,
  FilterSelection,
  Histogram,
  Kind,
  Level,
  TreeNode,
  ViewPayload,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const KINDS: Kind[] = ["emotional", "informational"];
const LEVELS: Level[] = ["high", "medium", "low"];
const BAR_MAX_PX = 48;

export interface PackHandlers {
  onZoomIn(path: string[]): void;
  onZoomOut(): void;
  onToggleFilter(selection: FilterSelection): void;
  onOpenPost(postId: string): void;
  onOpenComment(postId: string, commentId: string): void;
}

export class PackView {
  private view: ViewPayload | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly handlers: PackHandlers,
  ) {
    this.root.classList.add("pack-panel");
  }

  render(view: ViewPayload, viewport: Viewport = { width: 640, height: 640 }): void {
    this.view = view;
    this.root.innerHTML = "";
    this.root.appendChild(this.renderHistogram(view.histogram, view.filter));
    this.root.appendChild(this.renderCanvas(view, viewport));
    this.root.appendChild(this.renderPostList(view));
  }

  // -- histogram ---------------------------------------------------------

  private renderHistogram(
    histogram: Histogram,
    active: [string, string, string][],
  ): HTMLElement {
    const box = document.createElement("div");
    box.className = "histogram";
    box.dataset.direction = histogram.direction;
    const selected = new Set(active.map((s) => s.join(":")));
    const most = Math.max(
      1,
      ...KINDS.flatMap((kind) => LEVELS.map((level) => histogram.counts[kind][level])),
    );
    for (const kind of KINDS) {
      const group = document.createElement("div");
      group.className = "hist-kind";
      group.dataset.kind = kind;
      const caption = document.createElement("span");
      caption.className = "hist-caption";
      caption.textContent = `${histogram.direction} ${kind}`;
      group.appendChild(caption);
      for (const level of LEVELS) {
        const count = histogram.counts[kind][level];
        const bar = document.createElement("button");
        bar.className = "bar";
        bar.dataset.kind = kind;
        bar.dataset.level = level;
        bar.title = `${level}: ${count}`;
        bar.style.height = `${Math.round((count / most) * BAR_MAX_PX) + 4}px`;
        // A selected bar keeps its edge highlighted.
        if (selected.has(`${histogram.direction}:${kind}:${level}`)) {
          bar.classList.add("selected");
        }
        bar.addEventListener("click", () =>
          this.handlers.onToggleFilter([histogram.direction, kind, level]),
        );
        group.appendChild(bar);
      }
      box.appendChild(group);
    }
    return box;
  }

  // -- circles -----------------------------------------------------------

  private renderCanvas(view: ViewPayload, viewport: Viewport): SVGSVGElement {
    const svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    svg.setAttribute("class", "pack-canvas");
    svg.setAttribute("width", String(viewport.width));
    svg.setAttribute("height", String(viewport.height));
    const transform = unitTransform(viewport);

    // Anywhere outside the circles zooms one level out.
    const backdrop = document.createElementNS(SVG_NS, "rect");
    backdrop.setAttribute("class", "backdrop");
    backdrop.setAttribute("width", String(viewport.width));
    backdrop.setAttribute("height", String(viewport.height));
    backdrop.addEventListener("click", () => this.handlers.onZoomOut());
    svg.appendChild(backdrop);

    this.drawNode(svg, view.tree, transform, 0);
    return svg;
  }

  private drawNode(
    svg: SVGSVGElement,
    node: TreeNode,
    transform: Transform,
    depth: number,
  ): void {
    const { x, y } = applyPoint(transform, node.x, node.y);
    const r = applyRadius(transform, node.r);

    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("class", `node node-${node.level}`);
    circle.setAttribute("data-ref", node.ref_id);
    circle.setAttribute("cx", x.toFixed(2));
    circle.setAttribute("cy", y.toFixed(2));
    circle.setAttribute("r", r.toFixed(2));
    svg.appendChild(circle);

    if (node.level === "topic" && node.keywords?.length) {
      const label = document.createElementNS(SVG_NS, "text");
      label.setAttribute("class", "keywords");
      label.setAttribute("x", x.toFixed(2));
      label.setAttribute("y", (y - r - 4).toFixed(2));
      label.textContent = node.keywords.join(" ");
      svg.appendChild(label);
    }

    if (depth === 1) {
      this.wireInteractions(svg, circle, node, x, y, r);
    }
    for (const child of node.children) {
      this.drawNode(svg, child, transform, depth + 1);
    }
  }

  private wireInteractions(
    svg: SVGSVGElement,
    circle: SVGElement,
    node: TreeNode,
    x: number,
    y: number,
    r: number,
  ): void {
    circle.addEventListener("mouseenter", () => {
      circle.classList.add("hovered");
      const title = document.createElementNS(SVG_NS, "text");
      title.setAttribute("class", "hover-title");
      title.setAttribute("x", (x + r + 6).toFixed(2));
      title.setAttribute("y", y.toFixed(2));
      title.textContent = node.title ?? node.ref_id;
      svg.appendChild(title);
      for (const similar of node.similar_ids ?? []) {
        svg.querySelector(`.node[data-ref="${similar}"]`)?.classList.add("similar");
      }
    });
    circle.addEventListener("mouseleave", () => {
      circle.classList.remove("hovered");
      svg.querySelectorAll(".hover-title").forEach((el) => el.remove());
      svg.querySelectorAll(".node.similar").forEach((el) =>
        el.classList.remove("similar"),
      );
    });
    circle.addEventListener("click", (event) => {
      event.stopPropagation();
      const view = this.view;
      if (!view) return;
      if (node.level === "comment") {
        this.handlers.onOpenComment(view.tree.ref_id, node.ref_id);
      } else {
        this.handlers.onZoomIn([...view.path, node.ref_id]);
      }
    });
  }

  // -- post list ---------------------------------------------------------

  private renderPostList(view: ViewPayload): HTMLElement {
    const titles = new Map<string, string>();
    const walk = (node: TreeNode) => {
      if (node.level === "post" && node.title) titles.set(node.ref_id, node.title);
      node.children.forEach(walk);
    };
    walk(view.tree);

    const list = document.createElement("ol");
    list.className = "post-list";
    for (const postId of view.post_list) {
      const item = document.createElement("li");
      item.dataset.post = postId;
      item.textContent = titles.get(postId) ?? postId;
      item.addEventListener("click", () => this.handlers.onOpenPost(postId));
      list.appendChild(item);
    }
    return list;
  }
}
