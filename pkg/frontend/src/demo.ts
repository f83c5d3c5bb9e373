/** The fixed demo stimulus: a 64x64 density grid of three Gaussian blobs.
 *
 * Both panels of every query render this same grid; only the colormap
 * differs. Values are normalized to [0, 1].
 */

export const GRID_SIZE = 64;

const BLOBS: Array<{ cx: number; cy: number; sx: number; sy: number; w: number }> = [
  { cx: 22, cy: 24, sx: 9, sy: 11, w: 1.0 },
  { cx: 44, cy: 40, sx: 12, sy: 8, w: 0.85 },
  { cx: 34, cy: 14, sx: 6, sy: 6, w: 0.55 },
];

export function demoGrid(): Float64Array {
  const grid = new Float64Array(GRID_SIZE * GRID_SIZE);
  let max = 0;
  for (let y = 0; y < GRID_SIZE; y++) {
    for (let x = 0; x < GRID_SIZE; x++) {
      let v = 0;
      for (const b of BLOBS) {
        const dx = (x - b.cx) / b.sx;
        const dy = (y - b.cy) / b.sy;
        v += b.w * Math.exp(-0.5 * (dx * dx + dy * dy));
      }
      grid[y * GRID_SIZE + x] = v;
      if (v > max) max = v;
    }
  }
  for (let i = 0; i < grid.length; i++) grid[i] = (grid[i] as number) / max;
  return grid;
}
