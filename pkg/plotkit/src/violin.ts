/**
 * Violin plot of fidelity samples grouped by r, with an optional overlaid
 * line series (one point per overlay row, in row order).
 *
 * Groups with fewer than 2 samples, or with zero spread, degenerate to
 * scatter markers / a flat tick instead of a kernel shape.
 */

import { Table, numericColumn } from "./csv.js";
import { SvgDoc, defaultLayout, fmt, scaleLinear, ticks } from "./svg.js";

export interface ViolinGroup {
  r: number;
  samples: number[];
}

export interface OverlayPoint {
  r: number;
  fidelity: number;
}

export function groupSamples(table: Table): ViolinGroup[] {
  const r = numericColumn(table, "r");
  const f = numericColumn(table, "fidelity");
  const groups = new Map<number, number[]>();
  for (let k = 0; k < r.length; k++) {
    const list = groups.get(r[k]) ?? [];
    list.push(f[k]);
    groups.set(r[k], list);
  }
  return [...groups.entries()]
    .map(([rv, samples]) => ({ r: rv, samples }))
    .sort((a, b) => a.r - b.r);
}

export function overlaySeries(table: Table): OverlayPoint[] {
  const r = numericColumn(table, "r");
  const f = numericColumn(table, "fidelity");
  return r.map((rv, k) => ({ r: rv, fidelity: f[k] }));
}

function std(xs: number[]): number {
  const mean = xs.reduce((a, b) => a + b, 0) / xs.length;
  return Math.sqrt(xs.reduce((a, b) => a + (b - mean) ** 2, 0) / (xs.length - 1));
}

/** Gaussian kernel density on a uniform grid, Silverman bandwidth. */
export function kde(samples: number[], grid: number[]): number[] {
  const s = std(samples);
  const h = 1.06 * s * Math.pow(samples.length, -0.2);
  return grid.map((g) => {
    let acc = 0;
    for (const x of samples) {
      const u = (g - x) / h;
      acc += Math.exp(-0.5 * u * u);
    }
    return acc / (samples.length * h * Math.sqrt(2 * Math.PI));
  });
}

export function renderViolin(table: Table, overlay: Table | null, dpi: number): string {
  const groups = groupSamples(table);
  const layout = defaultLayout(dpi);
  const doc = new SvgDoc(layout);
  const { margin, width, height } = layout;
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const fontSize = plotH / 30;

  const allF = groups.flatMap((g) => g.samples);
  const overlayPts = overlay ? overlaySeries(overlay) : [];
  for (const p of overlayPts) {
    allF.push(p.fidelity);
  }
  const allR = groups.map((g) => g.r).concat(overlayPts.map((p) => p.r));
  const fLo = Math.min(...allF);
  const fHi = Math.max(...allF);
  const pad = fHi > fLo ? 0.05 * (fHi - fLo) : Math.max(1e-6, 0.01 * Math.abs(fHi));
  const rLo = Math.min(...allR);
  const rHi = Math.max(...allR);
  const sx = scaleLinear(rLo, rHi, margin.left + plotW * 0.08, margin.left + plotW * 0.92);
  const sy = scaleLinear(fLo - pad, fHi + pad, margin.top + plotH, margin.top);

  const halfWidth = groups.length > 1
    ? 0.35 * Math.abs(sx(groups[1].r) - sx(groups[0].r))
    : 0.1 * plotW;

  for (const g of groups) {
    const cx = sx(g.r);
    if (g.samples.length < 2) {
      for (const f of g.samples) {
        doc.circle(cx, sy(f), Math.max(2, fontSize / 4), "#1f77b4");
      }
      continue;
    }
    if (Math.min(...g.samples) === Math.max(...g.samples)) {
      const y = sy(g.samples[0]);
      doc.line(cx - halfWidth, y, cx + halfWidth, y, "#1f77b4", 2);
      continue;
    }
    const lo = Math.min(...g.samples);
    const hi = Math.max(...g.samples);
    const grid = Array.from({ length: 64 }, (_, k) => lo + ((hi - lo) * k) / 63);
    const dens = kde(g.samples, grid);
    const dMax = Math.max(...dens);
    const right = grid.map((f, k) => [cx + (halfWidth * dens[k]) / dMax, sy(f)] as [number, number]);
    const left = grid.map((f, k) => [cx - (halfWidth * dens[k]) / dMax, sy(f)] as [number, number]).reverse();
    const d =
      "M " + [...right, ...left].map(([x, y]) => `${fmt(x)} ${fmt(y)}`).join(" L ") + " Z";
    doc.path(d, "rgba(31,119,180,0.45)", "#1f77b4");
    doc.line(cx - halfWidth / 3, sy(lo), cx + halfWidth / 3, sy(lo), "#1f77b4", 1);
    doc.line(cx - halfWidth / 3, sy(hi), cx + halfWidth / 3, sy(hi), "#1f77b4", 1);
  }

  if (overlayPts.length > 0) {
    doc.polyline(overlayPts.map((p) => [sx(p.r), sy(p.fidelity)]), "#d62728", 2);
  }

  for (const t of ticks(rLo, rHi, 6)) {
    doc.text(sx(t), margin.top + plotH + 2.2 * fontSize, fmt(t), fontSize);
  }
  for (const t of ticks(fLo - pad, fHi + pad, 6)) {
    doc.text(margin.left - fontSize, sy(t) + 0.35 * fontSize, fmt(t), fontSize, "end");
  }
  doc.text(margin.left + plotW / 2, margin.top + plotH + 4 * fontSize, "r", 1.2 * fontSize);
  doc.text(margin.left - 5 * fontSize, margin.top + plotH / 2, "fidelity", 1.2 * fontSize, "middle", -90);
  return doc.render();
}
