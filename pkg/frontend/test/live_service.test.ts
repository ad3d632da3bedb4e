/**
 * End-to-end flows against a live `blockshelf serve` process: create a shelf
 * from a selection, drive all five shelf actions, verify the export download
 * is byte-identical to the CLI export, and recover from a 409 conflict.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { EditorStore } from "../src/state.js";

const PYTHON = process.env.BLOCKSHELF_PYTHON ?? "python3";
const FIXTURE = join(__dirname, "..", "..", "tests", "fixtures", "editor-demo.bshelf.xml");
const PORT = 8400 + (process.pid % 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let proc: ChildProcess;
let workDir: string;
let wsFile: string;

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/workspace`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error(`service did not come up on ${BASE}`);
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "blockshelf-ui-"));
  wsFile = join(workDir, "project.bshelf.xml");
  writeFileSync(wsFile, readFileSync(FIXTURE));
  proc = spawn(PYTHON, ["-m", "blockshelf.cli", "serve", wsFile, "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForService();
});

afterAll(() => {
  proc?.kill();
});

describe("editor against a live service", () => {
  it("runs the full shelf workflow", async () => {
    const store = new EditorStore(new ApiClient(BASE));
    await store.refresh();
    let state = store.getState();
    expect(Object.keys(state.workspace.blocks).length).toBe(69);

    // --- create a shelf from the selection of unshelved roots
    const shelved = new Set(state.workspace.shelves.flatMap((s) => s.members));
    const loose = state.workspace.top_level.filter((r) => !shelved.has(r));
    expect(loose.length).toBe(2);
    for (const root of loose) store.toggleSelect(root);
    expect(await store.createShelfFromSelection("Alert handlers")).toBe(true);
    state = store.getState();
    const created = state.shelfBox.find((s) => s.name === "Alert handlers");
    expect(created?.member_roots).toBe(2);
    expect(state.selection).toEqual([]);

    const shelfId = created!.shelf;

    // --- shelf visibility: hide removes the stacks from the canvas set
    expect(await store.setVisibility(shelfId, false)).toBe(true);
    state = store.getState();
    const members = state.workspace.shelves.find((s) => s.id === shelfId)!.members;
    for (const member of members) {
      expect(state.workspace.visible_roots).not.toContain(member);
    }
    expect(await store.setVisibility(shelfId, true)).toBe(true);

    // --- minimize/maximize: chips stay visible
    expect(await store.setCollapsed(shelfId, true)).toBe(true);
    state = store.getState();
    expect(state.shelfBox.find((s) => s.shelf === shelfId)?.collapse_state).toBe("all");
    for (const member of members) {
      expect(state.workspace.visible_roots).toContain(member);
      expect(state.workspace.blocks[member].collapsed).toBe(true);
    }
    expect(await store.setCollapsed(shelfId, false)).toBe(true);

    // --- deactivate: the codegen preview drops the handlers; activate restores
    const fullProgram = store.getState().codegen.text;
    expect(await store.setEnabled(shelfId, false)).toBe(true);
    state = store.getState();
    expect(state.codegen.text).not.toContain("Finished");
    expect(state.codegen.text.length).toBeLessThan(fullProgram.length);
    expect(await store.setEnabled(shelfId, true)).toBe(true);
    expect(store.getState().codegen.text).toBe(fullProgram);

    // --- duplicate: a "Copy of" row appears
    expect(await store.duplicateShelf(shelfId)).toBe(true);
    state = store.getState();
    expect(state.shelfBox.some((s) => s.name === "Copy of Alert handlers")).toBe(true);

    // --- export download is byte-identical to the CLI export
    const download = await store.exportShelf(shelfId);
    expect(download).not.toBeNull();
    expect(download!.filename).toBe("Alert handlers.shelfexport.xml");
    const cliOut = join(workDir, "cli-export.shelfexport.xml");
    // the CLI reads the file on disk: persist the service state first
    expect(await store.save()).toBe(true);
    execFileSync(PYTHON, [
      "-m",
      "blockshelf.cli",
      "shelf",
      "export",
      wsFile,
      "--shelf",
      shelfId,
      "-o",
      cliOut,
    ]);
    const apiBytes = Buffer.from(download!.bytes);
    const cliBytes = readFileSync(cliOut);
    expect(apiBytes.equals(cliBytes)).toBe(true);

    // --- import the downloaded document back
    expect(await store.importShelf(download!.bytes)).toBe(true);
    state = store.getState();
    expect(state.shelfBox.some((s) => s.name === "Alert handlers (imported)")).toBe(true);

    // --- saved file is valid for the CLI
    expect(await store.save()).toBe(true);
    execFileSync(PYTHON, ["-m", "blockshelf.cli", "validate", wsFile]);
  });

  it("recovers from a 409 conflict by refreshing", async () => {
    const store = new EditorStore(new ApiClient(BASE));
    await store.refresh();
    const seen = store.getState().revision;

    // out-of-band writer advances the workspace behind the store's back
    const rival = await fetch(`${BASE}/shelves/s1/visibility`, {
      method: "POST",
      headers: { "Content-Type": "application/json", "If-Match-Revision": String(seen) },
      body: JSON.stringify({ visible: false }),
    });
    expect(rival.status).toBe(200);

    const ok = await store.setCollapsed("s1", true);
    expect(ok).toBe(false);
    const state = store.getState();
    expect(state.toast).toMatch(/refreshed/i);
    expect(state.revision).toBe(seen + 1);

    // the retry against the refreshed revision succeeds
    expect(await store.setCollapsed("s1", true)).toBe(true);
  });
});
