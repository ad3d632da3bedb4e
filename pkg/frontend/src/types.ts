/** JSON shapes served by the blockshelf HTTP API. */

export interface BlockPayload {
  id: string;
  type: string;
  fields: Record<string, string>;
  values: Record<string, string | null>;
  statements: Record<string, string | null>;
  next: string | null;
  comment: string | null;
  collapsed: boolean;
  disabled: boolean;
  position: [number, number] | null;
}

export interface ShelfInfo {
  id: string;
  name: string;
  visible: boolean;
  members: string[];
}

export interface WorkspacePayload {
  blocks: Record<string, BlockPayload>;
  top_level: string[];
  visible_roots: string[];
  shelves: ShelfInfo[];
}

export interface ShelfStatus {
  shelf: string;
  name: string;
  member_roots: number;
  total_blocks: number;
  visible: boolean;
  collapse_state: "all" | "some" | "none";
  active_state: "all" | "some" | "none";
}

export interface CodegenPayload {
  text: string;
  handler_keys: string[];
}

export interface Envelope<T> {
  revision: number;
  payload: T;
  warnings: string[];
}

export interface ApiErrorBody {
  error: string;
  message: string;
}
