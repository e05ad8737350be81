/** Minimal STL reader for the client-side model preview. */

export interface StlMesh {
  /** Flat triangle soup: 9 floats per triangle. */
  positions: Float32Array;
  triangleCount: number;
}

const HEADER = 80;
const TRIANGLE_BYTES = 50;

export function parseStl(data: Uint8Array): StlMesh {
  if (data.length >= HEADER + 4) {
    const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
    const count = view.getUint32(HEADER, true);
    if (data.length === HEADER + 4 + TRIANGLE_BYTES * count) {
      return parseBinary(view, count);
    }
  }
  const text = new TextDecoder().decode(data);
  if (text.trimStart().toLowerCase().startsWith("solid")) return parseAscii(text);
  throw new Error("not a binary or ASCII STL");
}

function parseBinary(view: DataView, count: number): StlMesh {
  const positions = new Float32Array(count * 9);
  for (let i = 0; i < count; i++) {
    const base = HEADER + 4 + i * TRIANGLE_BYTES + 12; // skip normal
    for (let c = 0; c < 9; c++) {
      positions[i * 9 + c] = view.getFloat32(base + c * 4, true);
    }
  }
  return { positions, triangleCount: count };
}

function parseAscii(text: string): StlMesh {
  const matches = [...text.matchAll(/vertex\s+(\S+)\s+(\S+)\s+(\S+)/gi)];
  if (matches.length === 0 || matches.length % 3 !== 0) {
    throw new Error("malformed ASCII STL");
  }
  const positions = new Float32Array(matches.length * 3);
  matches.forEach((m, i) => {
    positions[i * 3] = Number(m[1]);
    positions[i * 3 + 1] = Number(m[2]);
    positions[i * 3 + 2] = Number(m[3]);
  });
  return { positions, triangleCount: matches.length / 3 };
}
