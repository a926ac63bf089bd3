// Rolling two-trace strip chart on a plain canvas: sensed angle (solid)
// and target (dashed) over the last 60 seconds.

import { TracePoint, TRACE_WINDOW_MS } from "./protocol.js";

export class StripChart {
  private ctx: CanvasRenderingContext2D;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly label: string,
    private readonly yMin: number,
    private readonly yMax: number,
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  draw(points: TracePoint[]): void {
    const { width, height } = this.canvas;
    const ctx = this.ctx;
    ctx.clearRect(0, 0, width, height);

    ctx.fillStyle = "#10151c";
    ctx.fillRect(0, 0, width, height);

    const yOf = (v: number) =>
      height - ((v - this.yMin) / (this.yMax - this.yMin)) * height;

    // zero line and bounds
    ctx.strokeStyle = "#2a3442";
    ctx.lineWidth = 1;
    for (const v of [this.yMin, 0, this.yMax]) {
      ctx.beginPath();
      ctx.moveTo(0, yOf(v));
      ctx.lineTo(width, yOf(v));
      ctx.stroke();
    }

    ctx.fillStyle = "#8a97a8";
    ctx.font = "11px sans-serif";
    ctx.fillText(`${this.label}  [${this.yMin}, ${this.yMax}] deg`, 6, 13);

    if (points.length >= 2) {
      const tEnd = points[points.length - 1].t;
      const tStart = tEnd - TRACE_WINDOW_MS;
      const xOf = (t: number) => ((t - tStart) / TRACE_WINDOW_MS) * width;

      this.trace(points, xOf, yOf, (p) => p.target, "#e8a33d", [5, 4]);
      this.trace(points, xOf, yOf, (p) => p.sensed, "#4db6e8", []);
    }
  }

  private trace(
    points: TracePoint[],
    xOf: (t: number) => number,
    yOf: (v: number) => number,
    pick: (p: TracePoint) => number,
    color: string,
    dash: number[],
  ): void {
    const ctx = this.ctx;
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.5;
    ctx.setLineDash(dash);
    ctx.beginPath();
    points.forEach((p, i) => {
      const x = xOf(p.t);
      const y = yOf(pick(p));
      if (i === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    });
    ctx.stroke();
    ctx.setLineDash([]);
  }
}
