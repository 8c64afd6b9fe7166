/**
 * Filled phase-space map of a Wigner function CSV (columns q, p, w) with a
 * diverging colormap pinned at W = 0 so negativity stands out.
 */

import { SchemaError, Table, numericColumn } from "./csv.js";
import { diverging } from "./colormap.js";
import { SvgDoc, defaultLayout, fmt, scaleLinear, ticks } from "./svg.js";

export interface WignerGrid {
  qValues: number[];
  pValues: number[];
  /** values[i][j] at (qValues[i], pValues[j]) */
  values: number[][];
}

export function buildWignerGrid(table: Table): WignerGrid {
  const q = numericColumn(table, "q");
  const p = numericColumn(table, "p");
  const w = numericColumn(table, "w");

  const qValues = [...new Set(q)].sort((a, b) => a - b);
  const pValues = [...new Set(p)].sort((a, b) => a - b);
  if (q.length !== qValues.length * pValues.length) {
    throw new SchemaError(
      `non-rectangular Wigner grid: ${q.length} rows != ${qValues.length} x ${pValues.length}`,
    );
  }
  const index = new Map<string, number>();
  for (let k = 0; k < q.length; k++) {
    index.set(`${q[k]}|${p[k]}`, w[k]);
  }
  const values = qValues.map((qv) =>
    pValues.map((pv) => {
      const cell = index.get(`${qv}|${pv}`);
      if (cell === undefined) {
        throw new SchemaError(`non-rectangular Wigner grid: missing q=${qv}, p=${pv}`);
      }
      return cell;
    }),
  );
  return { qValues, pValues, values };
}

export function renderWigner(table: Table, dpi: number): string {
  const grid = buildWignerGrid(table);
  const layout = defaultLayout(dpi);
  const doc = new SvgDoc(layout);
  const { margin, width, height } = layout;
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const fontSize = plotH / 30;

  const absMax = Math.max(...grid.values.flat().map(Math.abs));
  const cw = plotW / grid.qValues.length;
  const ch = plotH / grid.pValues.length;
  for (let i = 0; i < grid.qValues.length; i++) {
    for (let j = 0; j < grid.pValues.length; j++) {
      const x = margin.left + i * cw;
      const y = margin.top + (grid.pValues.length - 1 - j) * ch;
      doc.rect(x, y, cw + 0.5, ch + 0.5, diverging(grid.values[i][j], absMax));
    }
  }

  const qLo = grid.qValues[0];
  const qHi = grid.qValues[grid.qValues.length - 1];
  const pLo = grid.pValues[0];
  const pHi = grid.pValues[grid.pValues.length - 1];
  const sx = scaleLinear(qLo, qHi, margin.left, margin.left + plotW);
  const sy = scaleLinear(pLo, pHi, margin.top + plotH, margin.top);
  for (const t of ticks(qLo, qHi, 6)) {
    doc.text(sx(t), margin.top + plotH + 2.2 * fontSize, fmt(t), fontSize);
  }
  for (const t of ticks(pLo, pHi, 6)) {
    doc.text(margin.left - fontSize, sy(t) + 0.35 * fontSize, fmt(t), fontSize, "end");
  }
  doc.text(margin.left + plotW / 2, margin.top + plotH + 4 * fontSize, "q", 1.2 * fontSize);
  doc.text(margin.left - 4 * fontSize, margin.top + plotH / 2, "p", 1.2 * fontSize, "middle", -90);
  doc.text(margin.left + plotW / 2, margin.top - fontSize, `W(q, p), |W|max = ${fmt(absMax)}`, 1.1 * fontSize);

  // colorbar centered at zero
  const barX = margin.left + plotW + fontSize;
  const steps = 32;
  for (let k = 0; k < steps; k++) {
    const y = margin.top + plotH - ((k + 1) * plotH) / steps;
    const v = absMax * ((2 * (k + 0.5)) / steps - 1);
    doc.rect(barX, y, fontSize, plotH / steps + 0.5, diverging(v, absMax));
  }
  doc.text(barX + 2.5 * fontSize, margin.top + 0.35 * fontSize, fmt(absMax), fontSize, "start");
  doc.text(barX + 2.5 * fontSize, margin.top + plotH / 2 + 0.35 * fontSize, "0", fontSize, "start");
  doc.text(barX + 2.5 * fontSize, margin.top + plotH, fmt(-absMax), fontSize, "start");
  return doc.render();
}
