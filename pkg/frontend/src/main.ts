/** Editor bootstrap: wire the store to the DOM against a running service.
 *
 * The service URL defaults to the local `blockshelf serve` port and can be
 * overridden with `?api=http://host:port`.
 */

import { ApiClient } from "./api.js";
import { downloadBytes, readFileBytes } from "./download.js";
import { EditorStore } from "./state.js";
import type { Actions } from "./view.js";
import { render } from "./view.js";

const DEFAULT_API = "http://127.0.0.1:8375";

export function startEditor(mount: HTMLElement, baseUrl: string): EditorStore {
  const store = new EditorStore(new ApiClient(baseUrl));
  const actions: Actions = {
    onToggleSelect: (rootId) => store.toggleSelect(rootId),
    onCreateShelf: (name) => void store.createShelfFromSelection(name),
    onAssign: (shelfId) => void store.assignSelectionToShelf(shelfId),
    onVisibility: (shelfId, visible) => void store.setVisibility(shelfId, visible),
    onCollapse: (shelfId, collapsed) => void store.setCollapsed(shelfId, collapsed),
    onEnabled: (shelfId, enabled) => void store.setEnabled(shelfId, enabled),
    onDuplicate: (shelfId) => void store.duplicateShelf(shelfId),
    onExport: (shelfId) =>
      void store.exportShelf(shelfId).then((result) => {
        if (result) downloadBytes(result.bytes, result.filename);
      }),
    onImportFile: (file) =>
      void readFileBytes(file).then((bytes) => store.importShelf(bytes)),
    onSave: () => void store.save(),
    onDismissToast: () => store.clearToast(),
  };
  store.subscribe((state) => render(mount, state, actions));
  void store.refresh().catch((error) => {
    mount.textContent = `Cannot reach the blockshelf service at ${baseUrl}: ${error}`;
  });
  return store;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const params = new URLSearchParams(window.location.search);
  startEditor(document.getElementById("app")!, params.get("api") ?? DEFAULT_API);
}
