/**
 * DOM rendering: a simplified nested-outline canvas (not pixel-faithful
 * puzzle shapes), the ShelfBox panel with the five shelf actions, and a
 * read-only codegen preview so deactivation consequences are visible live.
 */

import type { UiState } from "./state.js";
import type { BlockPayload, WorkspacePayload } from "./types.js";

export interface Actions {
  onToggleSelect(rootId: string): void;
  onCreateShelf(name: string): void;
  onAssign(shelfId: string): void;
  onVisibility(shelfId: string, visible: boolean): void;
  onCollapse(shelfId: string, collapsed: boolean): void;
  onEnabled(shelfId: string, enabled: boolean): void;
  onDuplicate(shelfId: string): void;
  onExport(shelfId: string): void;
  onImportFile(file: File): void;
  onSave(): void;
  onDismissToast(): void;
}

const KNOWN_LABELS: Record<string, (b: BlockPayload) => string> = {
  component_event: (b) => `when ${b.fields.COMPONENT ?? "?"}.${b.fields.EVENT ?? "?"}`,
  procedures_defnoreturn: (b) => `to ${b.fields.NAME ?? "?"}`,
  procedures_defreturn: (b) => `to ${b.fields.NAME ?? "?"} (result)`,
  procedures_callnoreturn: (b) => `call ${b.fields.PROCNAME ?? "?"}`,
  procedures_callreturn: (b) => `call ${b.fields.PROCNAME ?? "?"}`,
  component_method_call: (b) => `call ${b.fields.COMPONENT ?? "?"}.${b.fields.METHOD ?? "?"}`,
  component_set: (b) => `set ${b.fields.COMPONENT ?? "?"}.${b.fields.PROPERTY ?? "?"}`,
  component_get: (b) => `${b.fields.COMPONENT ?? "?"}.${b.fields.PROPERTY ?? "?"}`,
  variables_set: (b) => `set ${b.fields.VAR ?? "?"}`,
  variables_get: (b) => `get ${b.fields.VAR ?? "?"}`,
  controls_if: () => "if",
  controls_repeat: () => "repeat",
  math_number: (b) => b.fields.NUM ?? "0",
  text: (b) => `"${b.fields.TEXT ?? ""}"`,
  logic_boolean: (b) => (b.fields.BOOL === "TRUE" ? "true" : "false"),
  math_arithmetic: (b) => b.fields.OP ?? "?",
  math_compare: (b) => b.fields.OP ?? "?",
  logic_operation: (b) => b.fields.OP ?? "?",
  logic_negate: () => "not",
};

export function blockLabel(block: BlockPayload): { text: string; placeholder: boolean } {
  const known = KNOWN_LABELS[block.type];
  if (known) return { text: known(block), placeholder: false };
  return { text: `unknown block: ${block.type}`, placeholder: true };
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderBlockRow(
  ws: WorkspacePayload,
  blockId: string,
  rootDisabled: boolean,
): HTMLElement {
  const block = ws.blocks[blockId];
  const label = blockLabel(block);
  const row = el("div", "block-row");
  if (label.placeholder) row.classList.add("placeholder");
  if (block.disabled || rootDisabled) row.classList.add("disabled");
  row.dataset.blockId = blockId;
  row.title = "Only top-level stacks can be shelved";
  const head = el("span", "block-label", label.text);
  row.appendChild(head);
  if (block.comment) row.appendChild(el("span", "block-comment", `// ${block.comment}`));

  const children = el("div", "block-children");
  for (const child of Object.values(block.values)) {
    if (child) children.appendChild(renderBlockRow(ws, child, rootDisabled || block.disabled));
  }
  for (const child of Object.values(block.statements)) {
    if (child) children.appendChild(renderBlockRow(ws, child, rootDisabled || block.disabled));
  }
  if (children.childElementCount > 0) row.appendChild(children);
  const wrapper = el("div", "block-chain");
  wrapper.appendChild(row);
  if (block.next) {
    wrapper.appendChild(renderBlockRow(ws, block.next, rootDisabled || block.disabled));
  }
  return wrapper;
}

function renderStack(state: UiState, rootId: string, actions: Actions): HTMLElement {
  const ws = state.workspace;
  const root = ws.blocks[rootId];
  const stack = el("div", "stack");
  stack.dataset.rootId = rootId;
  if (state.selection.includes(rootId)) stack.classList.add("selected");
  if (root.disabled) stack.classList.add("disabled");

  if (root.collapsed) {
    stack.classList.add("chip");
    const label = blockLabel(root);
    stack.appendChild(el("span", "chip-label", `▸ ${label.text}`));
  } else {
    stack.appendChild(renderBlockRow(ws, rootId, root.disabled));
  }
  stack.addEventListener("click", (event) => {
    event.stopPropagation();
    actions.onToggleSelect(rootId);
  });
  return stack;
}

function renderCanvas(state: UiState, actions: Actions): HTMLElement {
  const canvas = el("section", "canvas");
  canvas.id = "canvas";
  if (state.workspace.visible_roots.length === 0) {
    canvas.appendChild(
      el(
        "p",
        "empty-hint",
        state.workspace.top_level.length === 0
          ? "Empty workspace. Open a project with blocks to start shelving."
          : "All shelves are hidden. Show a shelf to see its stacks.",
      ),
    );
    return canvas;
  }
  for (const rootId of state.workspace.visible_roots) {
    canvas.appendChild(renderStack(state, rootId, actions));
  }
  return canvas;
}

function renderSelectionBar(state: UiState, actions: Actions): HTMLElement {
  const bar = el("div", "selection-bar");
  bar.id = "selection-bar";
  bar.appendChild(el("span", "selection-count", `${state.selection.length} selected`));

  const nameInput = document.createElement("input");
  nameInput.id = "new-shelf-name";
  nameInput.placeholder = "New shelf name";

  const target = document.createElement("select");
  target.id = "shelf-target";
  const fresh = document.createElement("option");
  fresh.value = "";
  fresh.textContent = "New shelf…";
  target.appendChild(fresh);
  for (const shelf of state.workspace.shelves) {
    const option = document.createElement("option");
    option.value = shelf.id;
    option.textContent = shelf.name;
    target.appendChild(option);
  }

  const button = document.createElement("button");
  button.id = "add-to-shelf";
  button.textContent = "Add to shelf";
  button.disabled = state.selection.length === 0 || state.pending;
  if (button.disabled) button.title = "Select one or more top-level stacks first";
  button.addEventListener("click", () => {
    if (target.value === "") {
      if (nameInput.value.trim()) actions.onCreateShelf(nameInput.value.trim());
    } else {
      actions.onAssign(target.value);
    }
  });

  bar.append(target, nameInput, button);
  return bar;
}

function renderShelfBox(state: UiState, actions: Actions): HTMLElement {
  const box = el("aside", "shelfbox");
  box.id = "shelfbox";
  box.appendChild(el("h2", "shelfbox-title", "ShelfBox"));
  if (state.shelfBox.length === 0) {
    box.appendChild(el("p", "empty-hint", "No shelves yet. Select stacks and add them."));
  }
  for (const status of state.shelfBox) {
    const row = el("div", "shelf-row");
    row.dataset.shelfId = status.shelf;
    const title = el("div", "shelf-name", status.name);
    title.appendChild(
      el(
        "span",
        "shelf-meta",
        ` ${status.member_roots} stacks / ${status.total_blocks} blocks`,
      ),
    );
    if (status.active_state !== "all") {
      title.appendChild(el("span", "shelf-badge off", " deactivated"));
      row.classList.add("inactive");
    }
    if (!status.visible) row.classList.add("hidden-shelf");
    row.appendChild(title);

    const buttons = el("div", "shelf-actions");
    const make = (
      name: string,
      label: string,
      handler: () => void,
    ): HTMLButtonElement => {
      const button = document.createElement("button");
      button.className = `shelf-action ${name}`;
      button.dataset.action = name;
      button.textContent = label;
      button.disabled = state.pending;
      button.addEventListener("click", (event) => {
        event.stopPropagation();
        handler();
      });
      buttons.appendChild(button);
      return button;
    };
    make("visibility", status.visible ? "Hide" : "Show", () =>
      actions.onVisibility(status.shelf, !status.visible),
    );
    make("collapse", status.collapse_state === "all" ? "Maximize" : "Minimize", () =>
      actions.onCollapse(status.shelf, status.collapse_state !== "all"),
    );
    make("enabled", status.active_state === "all" ? "Deactivate" : "Activate", () =>
      actions.onEnabled(status.shelf, status.active_state !== "all"),
    );
    make("duplicate", "Duplicate", () => actions.onDuplicate(status.shelf));
    make("export", "Export", () => actions.onExport(status.shelf));
    row.appendChild(buttons);
    box.appendChild(row);
  }

  const importLabel = el("label", "import-label", "Import shelf: ");
  const fileInput = document.createElement("input");
  fileInput.type = "file";
  fileInput.id = "import-file";
  fileInput.accept = ".xml";
  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (file) actions.onImportFile(file);
    fileInput.value = "";
  });
  importLabel.appendChild(fileInput);
  box.appendChild(importLabel);

  const save = document.createElement("button");
  save.id = "save-button";
  save.textContent = "Save";
  save.disabled = state.pending;
  save.addEventListener("click", () => actions.onSave());
  box.appendChild(save);
  return box;
}

function renderPreview(state: UiState): HTMLElement {
  const panel = el("section", "codegen-preview");
  panel.id = "codegen-preview";
  panel.appendChild(el("h2", "preview-title", "Program preview"));
  const pre = el("pre", "codegen-text", state.codegen.text || "(empty program)");
  panel.appendChild(pre);
  for (const warning of state.warnings) {
    panel.appendChild(el("p", "codegen-warning", warning));
  }
  return panel;
}

export function render(mount: HTMLElement, state: UiState, actions: Actions): void {
  mount.replaceChildren();
  if (state.toast) {
    const toast = el("div", "toast", state.toast);
    toast.id = "toast";
    toast.addEventListener("click", () => actions.onDismissToast());
    mount.appendChild(toast);
  }
  const header = el("header", "topbar");
  header.appendChild(el("span", "revision", `rev ${state.revision}`));
  if (state.pending) header.appendChild(el("span", "pending", "working…"));
  mount.appendChild(header);
  mount.appendChild(renderSelectionBar(state, actions));
  const main = el("main", "layout");
  main.appendChild(renderCanvas(state, actions));
  main.appendChild(renderShelfBox(state, actions));
  mount.appendChild(main);
  mount.appendChild(renderPreview(state));
}
