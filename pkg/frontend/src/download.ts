/** Browser file transfer helpers for shelf export/import. */

export function downloadBytes(bytes: ArrayBuffer, filename: string): void {
  const blob = new Blob([bytes], { type: "application/xml" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export function readFileBytes(file: File): Promise<ArrayBuffer> {
  return file.arrayBuffer();
}
