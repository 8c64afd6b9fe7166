/** Sequential and diverging colormaps as RGB interpolation over anchors. */

type Rgb = [number, number, number];

// viridis anchor colors, evenly spaced in [0, 1]
const VIRIDIS: Rgb[] = [
  [68, 1, 84],
  [72, 40, 120],
  [62, 74, 137],
  [49, 104, 142],
  [38, 130, 142],
  [31, 158, 137],
  [53, 183, 121],
  [109, 205, 89],
  [180, 222, 44],
  [253, 231, 37],
];

// blue -> white -> red, for data signed around zero
const DIVERGING: Rgb[] = [
  [33, 102, 172],
  [103, 169, 207],
  [209, 229, 240],
  [255, 255, 255],
  [253, 219, 199],
  [239, 138, 98],
  [178, 24, 43],
];

function interpolate(anchors: Rgb[], t: number): Rgb {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (anchors.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.min(lo + 1, anchors.length - 1);
  const f = pos - lo;
  return [0, 1, 2].map((k) => Math.round(anchors[lo][k] + f * (anchors[hi][k] - anchors[lo][k]))) as Rgb;
}

function hex(rgb: Rgb): string {
  return "#" + rgb.map((v) => v.toString(16).padStart(2, "0")).join("");
}

/** Map t in [0, 1] to a viridis hex color. */
export function viridis(t: number): string {
  return hex(interpolate(VIRIDIS, t));
}

/**
 * Map a value to the diverging palette with the center pinned at zero:
 * t = 0.5 corresponds to value 0 regardless of the data range.
 */
export function diverging(value: number, absMax: number): string {
  const t = absMax > 0 ? 0.5 + 0.5 * (value / absMax) : 0.5;
  return hex(interpolate(DIVERGING, t));
}
