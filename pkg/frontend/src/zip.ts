/** Reader for the repository's download archives.
 *
 * The server writes them with no compression (method 0, sizes in the
 * local header), so sequentially walking local file headers is enough —
 * no central directory or inflate needed. */

const LOCAL_HEADER_SIG = 0x04034b50;

export function readZip(data: Uint8Array): Map<string, Uint8Array> {
  const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
  const entries = new Map<string, Uint8Array>();
  let offset = 0;
  while (offset + 30 <= data.length && view.getUint32(offset, true) === LOCAL_HEADER_SIG) {
    const method = view.getUint16(offset + 8, true);
    const compressedSize = view.getUint32(offset + 18, true);
    const nameLength = view.getUint16(offset + 26, true);
    const extraLength = view.getUint16(offset + 28, true);
    const name = new TextDecoder().decode(
      data.subarray(offset + 30, offset + 30 + nameLength),
    );
    if (method !== 0) throw new Error(`zip entry ${name} is compressed; expected stored`);
    const start = offset + 30 + nameLength + extraLength;
    entries.set(name, data.subarray(start, start + compressedSize));
    offset = start + compressedSize;
  }
  if (entries.size === 0) throw new Error("no zip entries found");
  return entries;
}
