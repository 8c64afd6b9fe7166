/** Minimal SVG document builder with a margin-based plot area. */

export interface Layout {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
}

export function defaultLayout(dpi: number): Layout {
  const scale = dpi / 100;
  return {
    width: Math.round(640 * scale),
    height: Math.round(480 * scale),
    margin: {
      top: Math.round(40 * scale),
      right: Math.round(90 * scale),
      bottom: Math.round(60 * scale),
      left: Math.round(80 * scale),
    },
  };
}

export function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString();
}

export class SvgDoc {
  private parts: string[] = [];
  readonly layout: Layout;

  constructor(layout: Layout) {
    this.layout = layout;
  }

  add(element: string): void {
    this.parts.push(element);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.add(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    this.add(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.add(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${fmt(width)}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 2): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.add(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${fmt(width)}"/>`,
    );
  }

  path(d: string, fill: string, stroke = "none"): void {
    this.add(`<path d="${d}" fill="${fill}" stroke="${stroke}"/>`);
  }

  text(x: number, y: number, content: string, size: number, anchor = "middle", rotate = 0): void {
    const transform = rotate !== 0 ? ` transform="rotate(${rotate} ${fmt(x)} ${fmt(y)})"` : "";
    this.add(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${fmt(size)}" ` +
        `font-family="sans-serif" text-anchor="${anchor}"${transform}>${escapeXml(content)}</text>`,
    );
  }

  render(): string {
    const { width, height } = this.layout;
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}">\n` +
      `<rect width="${width}" height="${height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Affine map from a data interval to a pixel interval. */
export function scaleLinear(d0: number, d1: number, p0: number, p1: number): (v: number) => number {
  const span = d1 - d0;
  if (span === 0) {
    return () => (p0 + p1) / 2;
  }
  return (v: number) => p0 + ((v - d0) / span) * (p1 - p0);
}

/** Round axis tick values: at most n ticks over [lo, hi]. */
export function ticks(lo: number, hi: number, n: number): number[] {
  if (lo === hi) {
    return [lo];
  }
  const step = Math.pow(10, Math.floor(Math.log10((hi - lo) / n)));
  const err = (hi - lo) / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12; v += s) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}
