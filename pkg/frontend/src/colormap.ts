/** Hex-array colormap lookup and heatmap pixel generation.
 *
 * The client does no color math beyond this table lookup; all perceptual
 * computation happens server-side.
 */

export function hexToRgb(hex: string): [number, number, number] {
  const t = hex.replace("#", "");
  return [
    parseInt(t.slice(0, 2), 16),
    parseInt(t.slice(2, 4), 16),
    parseInt(t.slice(4, 6), 16),
  ];
}

/** Map a normalized value to a colormap index by linear scaling. */
export function colorIndex(value: number, n: number): number {
  const v = Math.max(0, Math.min(1, value));
  return Math.min(n - 1, Math.round(v * (n - 1)));
}

/** RGBA bytes for a density grid under a hex colormap.
 *
 * Low values map to the start of the ramp (light), high values to the end
 * (dark), so dense regions read as dark on a white page.
 */
export function heatmapBytes(grid: Float64Array, size: number, colors: string[]): Uint8ClampedArray {
  const rgb = colors.map(hexToRgb);
  const out = new Uint8ClampedArray(size * size * 4);
  for (let i = 0; i < size * size; i++) {
    const entry = rgb[colorIndex(grid[i] as number, rgb.length)] as [number, number, number];
    out[i * 4] = entry[0];
    out[i * 4 + 1] = entry[1];
    out[i * 4 + 2] = entry[2];
    out[i * 4 + 3] = 255;
  }
  return out;
}

/** RGBA bytes for a 1-pixel-tall ramp strip (one column per color). */
export function rampBytes(colors: string[]): Uint8ClampedArray {
  const out = new Uint8ClampedArray(colors.length * 4);
  colors.forEach((hex, i) => {
    const [r, g, b] = hexToRgb(hex);
    out[i * 4] = r;
    out[i * 4 + 1] = g;
    out[i * 4 + 2] = b;
    out[i * 4 + 3] = 255;
  });
  return out;
}
