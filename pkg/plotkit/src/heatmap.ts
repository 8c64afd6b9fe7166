/**
 * Heatmap over the (r, xi_dB) sweep grid for a selectable value column.
 */

import { SchemaError, Table, columnIndex, numericColumn } from "./csv.js";
import { viridis } from "./colormap.js";
import { SvgDoc, defaultLayout, fmt, scaleLinear, ticks } from "./svg.js";

export interface HeatmapGrid {
  rValues: number[];
  xiValues: number[];
  /** values[i][j] for (rValues[i], xiValues[j]) */
  values: number[][];
}

export function buildGrid(table: Table, valueColumn: string): HeatmapGrid {
  const r = numericColumn(table, "r");
  const xi = numericColumn(table, "xi_dB");
  const v = numericColumn(table, valueColumn);

  const rValues = [...new Set(r)].sort((a, b) => a - b);
  const xiValues = [...new Set(xi)].sort((a, b) => a - b);
  const index = new Map<string, number>();
  for (let k = 0; k < r.length; k++) {
    index.set(`${r[k]}|${xi[k]}`, v[k]);
  }
  const values = rValues.map((rv) =>
    xiValues.map((xv) => {
      const cell = index.get(`${rv}|${xv}`);
      if (cell === undefined) {
        throw new SchemaError(`sweep grid is missing cell r=${rv}, xi_dB=${xv}`);
      }
      return cell;
    }),
  );
  return { rValues, xiValues, values };
}

export function renderHeatmap(table: Table, valueColumn: string, dpi: number): string {
  columnIndex(table, valueColumn);
  const grid = buildGrid(table, valueColumn);
  const layout = defaultLayout(dpi);
  const doc = new SvgDoc(layout);
  const { margin, width, height } = layout;
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;

  const flat = grid.values.flat();
  const vmin = Math.min(...flat);
  const vmax = Math.max(...flat);
  const norm = (v: number) => (vmax > vmin ? (v - vmin) / (vmax - vmin) : 0.5);

  const cw = plotW / grid.rValues.length;
  const ch = plotH / grid.xiValues.length;
  for (let i = 0; i < grid.rValues.length; i++) {
    for (let j = 0; j < grid.xiValues.length; j++) {
      const x = margin.left + i * cw;
      // larger xi_dB drawn higher up
      const y = margin.top + (grid.xiValues.length - 1 - j) * ch;
      doc.rect(x, y, cw + 0.5, ch + 0.5, viridis(norm(grid.values[i][j])));
    }
  }

  drawAxes(doc, grid, valueColumn, vmin, vmax);
  return doc.render();
}

function drawAxes(doc: SvgDoc, grid: HeatmapGrid, valueColumn: string, vmin: number, vmax: number) {
  const { margin, width, height } = doc.layout;
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const fontSize = plotH / 30;

  const rLo = grid.rValues[0];
  const rHi = grid.rValues[grid.rValues.length - 1];
  const xiLo = grid.xiValues[0];
  const xiHi = grid.xiValues[grid.xiValues.length - 1];
  const sx = scaleLinear(rLo, rHi, margin.left + plotW / (2 * grid.rValues.length),
    margin.left + plotW - plotW / (2 * grid.rValues.length));
  const sy = scaleLinear(xiLo, xiHi, margin.top + plotH - plotH / (2 * grid.xiValues.length),
    margin.top + plotH / (2 * grid.xiValues.length));

  for (const t of ticks(rLo, rHi, 6)) {
    doc.text(sx(t), margin.top + plotH + 2.2 * fontSize, fmt(t), fontSize);
  }
  for (const t of ticks(xiLo, xiHi, 6)) {
    doc.text(margin.left - fontSize, sy(t) + 0.35 * fontSize, fmt(t), fontSize, "end");
  }
  doc.text(margin.left + plotW / 2, margin.top + plotH + 4 * fontSize, "r", 1.2 * fontSize);
  doc.text(margin.left - 4 * fontSize, margin.top + plotH / 2, "xi_dB", 1.2 * fontSize, "middle", -90);
  doc.text(margin.left + plotW / 2, margin.top - fontSize, valueColumn, 1.2 * fontSize);

  // colorbar
  const barX = margin.left + plotW + fontSize;
  const steps = 32;
  for (let k = 0; k < steps; k++) {
    const y = margin.top + plotH - ((k + 1) * plotH) / steps;
    doc.rect(barX, y, fontSize, plotH / steps + 0.5, viridis((k + 0.5) / steps));
  }
  doc.text(barX + 2.5 * fontSize, margin.top + 0.35 * fontSize, fmt(vmax), fontSize, "start");
  doc.text(barX + 2.5 * fontSize, margin.top + plotH, fmt(vmin), fontSize, "start");
}
