/**
 * Editor store. State only ever changes from confirmed service responses:
 * every mutation posts with the last-known revision, then re-reads the
 * workspace, shelf listing and codegen preview. A 409 (someone else moved
 * the workspace) triggers a toast and an automatic refresh, after which the
 * user can retry.
 */

import { ApiClient, ApiError } from "./api.js";
import type { CodegenPayload, ShelfStatus, WorkspacePayload } from "./types.js";

/** The service surface the store needs; tests substitute fakes. */
export type ServiceApi = Pick<
  ApiClient,
  | "workspace"
  | "shelves"
  | "codegen"
  | "createShelf"
  | "assignToShelf"
  | "setVisibility"
  | "setCollapsed"
  | "setEnabled"
  | "duplicateShelf"
  | "exportShelf"
  | "importShelf"
  | "save"
>;

export interface UiState {
  loaded: boolean;
  revision: number;
  workspace: WorkspacePayload;
  shelfBox: ShelfStatus[];
  codegen: CodegenPayload;
  warnings: string[];
  selection: string[];
  pending: boolean;
  toast: string | null;
}

const EMPTY_WORKSPACE: WorkspacePayload = {
  blocks: {},
  top_level: [],
  visible_roots: [],
  shelves: [],
};

export type Listener = (state: UiState) => void;

export class EditorStore {
  private state: UiState = {
    loaded: false,
    revision: 0,
    workspace: EMPTY_WORKSPACE,
    shelfBox: [],
    codegen: { text: "", handler_keys: [] },
    warnings: [],
    selection: [],
    pending: false,
    toast: null,
  };
  private listeners: Listener[] = [];

  constructor(private readonly api: ServiceApi) {}

  getState(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  async refresh(): Promise<void> {
    const workspace = await this.api.workspace();
    const shelves = await this.api.shelves();
    const codegen = await this.api.codegen();
    const liveRoots = new Set(workspace.payload.top_level);
    this.emit({
      loaded: true,
      revision: workspace.revision,
      workspace: workspace.payload,
      shelfBox: shelves.payload,
      codegen: codegen.payload,
      warnings: codegen.warnings,
      selection: this.state.selection.filter((id) => liveRoots.has(id)),
    });
  }

  toggleSelect(rootId: string): void {
    if (!this.state.workspace.top_level.includes(rootId)) return;
    const selection = this.state.selection.includes(rootId)
      ? this.state.selection.filter((id) => id !== rootId)
      : [...this.state.selection, rootId];
    this.emit({ selection });
  }

  clearToast(): void {
    this.emit({ toast: null });
  }

  /** Run one mutation against the current revision; refresh on success,
   * toast + auto-refresh on conflict, toast on domain errors. */
  private async mutate(action: (revision: number) => Promise<unknown>): Promise<boolean> {
    this.emit({ pending: true, toast: null });
    try {
      await action(this.state.revision);
      await this.refresh();
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refresh();
        this.emit({ toast: "Workspace changed elsewhere; view refreshed. Try again." });
      } else if (error instanceof ApiError) {
        this.emit({ toast: `${error.code}: ${error.message}` });
      } else {
        this.emit({ toast: String(error) });
      }
      return false;
    } finally {
      this.emit({ pending: false });
    }
  }

  async createShelfFromSelection(name: string): Promise<boolean> {
    const roots = [...this.state.selection];
    const ok = await this.mutate((rev) => this.api.createShelf(rev, name, roots));
    if (ok) this.emit({ selection: [] });
    return ok;
  }

  async assignSelectionToShelf(shelfId: string): Promise<boolean> {
    const roots = [...this.state.selection];
    const ok = await this.mutate((rev) => this.api.assignToShelf(rev, shelfId, roots));
    if (ok) this.emit({ selection: [] });
    return ok;
  }

  setVisibility(shelfId: string, visible: boolean): Promise<boolean> {
    return this.mutate((rev) => this.api.setVisibility(rev, shelfId, visible));
  }

  setCollapsed(shelfId: string, collapsed: boolean): Promise<boolean> {
    return this.mutate((rev) => this.api.setCollapsed(rev, shelfId, collapsed));
  }

  setEnabled(shelfId: string, enabled: boolean): Promise<boolean> {
    return this.mutate((rev) => this.api.setEnabled(rev, shelfId, enabled));
  }

  duplicateShelf(shelfId: string): Promise<boolean> {
    return this.mutate((rev) => this.api.duplicateShelf(rev, shelfId));
  }

  importShelf(document: ArrayBuffer | string): Promise<boolean> {
    return this.mutate((rev) => this.api.importShelf(rev, document));
  }

  async exportShelf(shelfId: string): Promise<{ bytes: ArrayBuffer; filename: string } | null> {
    try {
      return await this.api.exportShelf(shelfId);
    } catch (error) {
      this.emit({
        toast: error instanceof ApiError ? `${error.code}: ${error.message}` : String(error),
      });
      return null;
    }
  }

  async save(): Promise<boolean> {
    try {
      const result = await this.api.save();
      this.emit({ toast: `Saved ${result.payload.path}` });
      return true;
    } catch (error) {
      this.emit({
        toast: error instanceof ApiError ? `${error.code}: ${error.message}` : String(error),
      });
      return false;
    }
  }
}
