// Mirrors of the server's JSON payloads. The client renders these as-is:
// no geometry, scoring, or text analysis happens on this side.

export type Direction = "seeking" | "providing";
export type Kind = "emotional" | "informational";
export type Level = "high" | "medium" | "low";
export type FilterSelection = [Direction, Kind, Level];

export interface SessionInfo {
  schema_version: number;
  session: string;
  palette: string[];
  n_top: number;
  k: number;
}

export interface LabelSet {
  emotional: Level;
  informational: Level;
}

export interface TreeNode {
  level: "root" | "topic" | "post" | "comment";
  ref_id: string;
  weight: number;
  x: number;
  y: number;
  r: number;
  children: TreeNode[];
  title?: string;
  keywords?: string[];
  labels?: LabelSet;
  similar_ids?: string[];
  rank?: number;
}

export interface Histogram {
  direction: Direction;
  counts: Record<Kind, Record<Level, number>>;
}

export interface ViewPayload {
  schema_version: number;
  level: "topic" | "post" | "comment";
  path: string[];
  histogram: Histogram;
  post_list: string[];
  tree: TreeNode;
  query: string;
  filter: [string, string, string][];
}

export interface PostPayload {
  id: string;
  title: string;
  body: string;
  created_utc: number;
  labels: LabelSet;
}

export interface CommentPayload {
  id: string;
  body: string;
  depth: number;
  created_utc: number;
  labels: LabelSet;
}

export interface HighlightPayload {
  id: string;
  target: string;
  char_start: number;
  char_end: number;
  exact_text: string;
  color: string;
  edited_text: string | null;
}

export interface PostDetailPayload {
  schema_version: number;
  post: PostPayload;
  comments: CommentPayload[];
  highlights: HighlightPayload[];
}

export interface SummarySection {
  subtitle: string;
  content: string;
}

export interface SummaryPayload {
  title: string;
  sections: SummarySection[];
}

export interface FolderPayload {
  schema_version: number;
  color: string;
  entries: HighlightPayload[];
  summary: SummaryPayload | null;
  summary_stale: boolean;
}

export interface MindMapNodePayload {
  id: string;
  label: string;
  origin: "machine" | "user";
  children: MindMapNodePayload[];
}

export interface MindMapPayload {
  schema_version: number;
  color: string;
  root: MindMapNodePayload;
}

export interface BoardNodePayload {
  id: string;
  question: string;
  origin: "recommended" | "user";
  answered: boolean;
  answer: string;
  error: string | null;
  recommendations: string[];
  recommendations_stale: boolean;
  children: BoardNodePayload[];
}

export interface BoardPayload {
  schema_version: number;
  id: string;
  selected_text: string;
  collapsed: boolean;
  recommendations: string[];
  degraded: boolean;
  threads: BoardNodePayload[];
}

export interface JobTicket {
  schema_version: number;
  job: string;
  status: "pending" | "done" | "error";
  result?: unknown;
  error?: { code: string; message: string };
}

export interface NavigatePayload {
  schema_version: number;
  target: string;
  char_start: number;
  char_end: number;
}
