import { describe, expect, it } from "vitest";

import { ApiError } from "../src/api.js";
import { EditorStore, type ServiceApi } from "../src/state.js";
import type { Envelope, ShelfStatus, WorkspacePayload } from "../src/types.js";

/** Minimal in-memory service double tracking revisions like the real one. */
class FakeService {
  revision = 0;
  failNext: ApiError | null = null;
  calls: string[] = [];
  workspacePayload: WorkspacePayload = {
    blocks: {
      b1: {
        id: "b1",
        type: "component_event",
        fields: { COMPONENT: "Button1", EVENT: "Click" },
        values: {},
        statements: {},
        next: null,
        comment: null,
        collapsed: false,
        disabled: false,
        position: [0, 0],
      },
    },
    top_level: ["b1"],
    visible_roots: ["b1"],
    shelves: [],
  };
  shelfStatuses: ShelfStatus[] = [];

  private envelope<T>(payload: T): Envelope<T> {
    return { revision: this.revision, payload, warnings: [] };
  }

  private mutation<T>(name: string, payload: T): Promise<Envelope<T>> {
    this.calls.push(name);
    if (this.failNext) {
      const failure = this.failNext;
      this.failNext = null;
      return Promise.reject(failure);
    }
    this.revision += 1;
    return Promise.resolve(this.envelope(payload));
  }

  api(): ServiceApi {
    return {
      workspace: async () => this.envelope(this.workspacePayload),
      shelves: async () => this.envelope(this.shelfStatuses),
      codegen: async () => this.envelope({ text: "(when Button1 Click)\n", handler_keys: ["k"] }),
      createShelf: (rev, name, roots) => this.mutation("create", { shelf: "s1" }),
      assignToShelf: (rev, shelf, roots) => this.mutation("assign", { shelf }),
      setVisibility: (rev, shelf, visible) => this.mutation("visibility", { shelf, visible }),
      setCollapsed: (rev, shelf, collapsed) => this.mutation("collapse", { shelf, collapsed }),
      setEnabled: (rev, shelf, enabled) => this.mutation("enabled", { shelf, enabled }),
      duplicateShelf: (rev, shelf) => this.mutation("duplicate", { shelf: "s2", name: "Copy" }),
      exportShelf: async () => ({ bytes: new ArrayBuffer(4), filename: "x.shelfexport.xml" }),
      importShelf: (rev, doc) => this.mutation("import", { shelf: "s3", name: "Imported" }),
      save: async () => this.envelope({ path: "p.bshelf.xml", bytes: 10 }),
    };
  }
}

describe("EditorStore", () => {
  it("loads state only from service envelopes", async () => {
    const service = new FakeService();
    const store = new EditorStore(service.api());
    expect(store.getState().loaded).toBe(false);
    await store.refresh();
    const state = store.getState();
    expect(state.loaded).toBe(true);
    expect(state.workspace.top_level).toEqual(["b1"]);
    expect(state.codegen.text).toContain("Button1");
  });

  it("selection toggles only on known roots and clears after shelving", async () => {
    const service = new FakeService();
    const store = new EditorStore(service.api());
    await store.refresh();
    store.toggleSelect("nested-block");
    expect(store.getState().selection).toEqual([]);
    store.toggleSelect("b1");
    expect(store.getState().selection).toEqual(["b1"]);
    const ok = await store.createShelfFromSelection("Buttons");
    expect(ok).toBe(true);
    expect(store.getState().selection).toEqual([]);
    expect(service.calls).toEqual(["create"]);
  });

  it("revision advances only via refresh after confirmed mutations", async () => {
    const service = new FakeService();
    const store = new EditorStore(service.api());
    await store.refresh();
    expect(store.getState().revision).toBe(0);
    await store.setVisibility("s1", false);
    expect(store.getState().revision).toBe(1);
  });

  it("409 conflicts toast and auto-refresh", async () => {
    const service = new FakeService();
    const store = new EditorStore(service.api());
    await store.refresh();
    service.revision = 5; // someone else mutated
    service.failNext = new ApiError(409, "stale-revision", "workspace is at revision 5");
    const ok = await store.setEnabled("s1", false);
    expect(ok).toBe(false);
    const state = store.getState();
    expect(state.toast).toMatch(/refreshed/i);
    expect(state.revision).toBe(5); // auto-refresh picked up the new revision
    // retry now succeeds against the fresh revision
    const retried = await store.setEnabled("s1", false);
    expect(retried).toBe(true);
    expect(store.getState().revision).toBe(6);
  });

  it("domain errors surface inline without changing the snapshot", async () => {
    const service = new FakeService();
    const store = new EditorStore(service.api());
    await store.refresh();
    const before = store.getState().workspace;
    service.failNext = new ApiError(422, "already-shelved", "'b1' already belongs to a shelf");
    const ok = await store.assignSelectionToShelf("s1");
    expect(ok).toBe(false);
    expect(store.getState().toast).toBe("already-shelved: 'b1' already belongs to a shelf");
    expect(store.getState().workspace).toEqual(before);
    expect(store.getState().pending).toBe(false);
  });

  it("export failures toast instead of throwing", async () => {
    const service = new FakeService();
    const api = service.api();
    api.exportShelf = async () => {
      throw new ApiError(404, "unknown-shelf", "no shelf 's9'");
    };
    const store = new EditorStore(api);
    await store.refresh();
    const result = await store.exportShelf("s9");
    expect(result).toBeNull();
    expect(store.getState().toast).toContain("unknown-shelf");
  });
});
