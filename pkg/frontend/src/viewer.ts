/** Tiny canvas renderer for STL previews: orthographic projection with a
 * fixed isometric-ish view, painter-sorted flat shading. Good enough for
 * "is this the right model?", no WebGL required. */

import { StlMesh } from "./stl.js";

const LIGHT = [0.45, -0.5, 0.75];

export function renderPreview(canvas: HTMLCanvasElement, mesh: StlMesh): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  if (mesh.triangleCount === 0) return;

  // rotate: 30 deg around X after 35 deg around Z
  const az = (35 * Math.PI) / 180;
  const ax = (-65 * Math.PI) / 180;
  const cz = Math.cos(az), sz = Math.sin(az);
  const cx = Math.cos(ax), sx = Math.sin(ax);
  const p = mesh.positions;
  const n = mesh.triangleCount;
  const projected = new Float32Array(n * 9); // x, y, depth per vertex

  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (let i = 0; i < n * 3; i++) {
    const x0 = p[i * 3], y0 = p[i * 3 + 1], z0 = p[i * 3 + 2];
    const x1 = x0 * cz - y0 * sz;
    const y1 = x0 * sz + y0 * cz;
    const y2 = y1 * cx - z0 * sx;
    const depth = y1 * sx + z0 * cx;
    projected[i * 3] = x1;
    projected[i * 3 + 1] = -y2;
    projected[i * 3 + 2] = depth;
    minX = Math.min(minX, x1); maxX = Math.max(maxX, x1);
    minY = Math.min(minY, -y2); maxY = Math.max(maxY, -y2);
  }
  const scale = 0.85 * Math.min(width / (maxX - minX || 1), height / (maxY - minY || 1));
  const offX = width / 2 - ((minX + maxX) / 2) * scale;
  const offY = height / 2 - ((minY + maxY) / 2) * scale;

  const order = [...Array(n).keys()];
  const depthOf = (t: number) =>
    projected[t * 9 + 2] + projected[t * 9 + 5] + projected[t * 9 + 8];
  order.sort((a, b) => depthOf(a) - depthOf(b));

  const lightNorm = Math.hypot(...LIGHT);
  for (const t of order) {
    const ax0 = p[t * 9], ay0 = p[t * 9 + 1], az0 = p[t * 9 + 2];
    const bx = p[t * 9 + 3] - ax0, by = p[t * 9 + 4] - ay0, bz = p[t * 9 + 5] - az0;
    const cx2 = p[t * 9 + 6] - ax0, cy2 = p[t * 9 + 7] - ay0, cz2 = p[t * 9 + 8] - az0;
    const nx = by * cz2 - bz * cy2;
    const ny = bz * cx2 - bx * cz2;
    const nz = bx * cy2 - by * cx2;
    const len = Math.hypot(nx, ny, nz) || 1;
    const lambert = Math.abs(
      (nx * LIGHT[0] + ny * LIGHT[1] + nz * LIGHT[2]) / (len * lightNorm),
    );
    const shade = Math.round(70 + 160 * lambert);
    ctx.fillStyle = `rgb(${shade * 0.55}, ${shade * 0.75}, ${shade})`;
    ctx.beginPath();
    ctx.moveTo(projected[t * 9] * scale + offX, projected[t * 9 + 1] * scale + offY);
    ctx.lineTo(projected[t * 9 + 3] * scale + offX, projected[t * 9 + 4] * scale + offY);
    ctx.lineTo(projected[t * 9 + 6] * scale + offX, projected[t * 9 + 7] * scale + offY);
    ctx.closePath();
    ctx.fill();
  }
}
