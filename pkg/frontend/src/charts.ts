/** Minimal canvas strip charts; rendering is driven by animation frames from a
 * shared sample buffer, never directly by socket messages.
 */

export interface SeriesSpec {
  label: string;
  color: string;
  dashed?: boolean;
}

export interface StripPoint {
  t: number;
  values: number[];
}

export class StripChart {
  private points: StripPoint[] = [];

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly series: SeriesSpec[],
    private readonly windowSeconds: number,
    private readonly title: string,
  ) {}

  push(point: StripPoint): void {
    this.points.push(point);
    const horizon = point.t - this.windowSeconds;
    while (this.points.length > 0 && this.points[0].t < horizon) this.points.shift();
  }

  clear(): void {
    this.points = [];
  }

  render(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx || this.points.length < 2) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);

    let lo = Infinity;
    let hi = -Infinity;
    for (const p of this.points) {
      for (const v of p.values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
    }
    if (!(hi > lo)) {
      hi = lo + 1;
    }
    const pad = (hi - lo) * 0.1;
    lo -= pad;
    hi += pad;
    const t1 = this.points[this.points.length - 1].t;
    const t0 = t1 - this.windowSeconds;
    const x = (t: number) => ((t - t0) / this.windowSeconds) * width;
    const y = (v: number) => height - ((v - lo) / (hi - lo)) * height;

    ctx.strokeStyle = "#2a2f3a";
    ctx.lineWidth = 1;
    ctx.beginPath();
    const zeroY = y(0);
    if (zeroY >= 0 && zeroY <= height) {
      ctx.moveTo(0, zeroY);
      ctx.lineTo(width, zeroY);
    }
    ctx.stroke();

    this.series.forEach((spec, idx) => {
      ctx.strokeStyle = spec.color;
      ctx.lineWidth = 1.4;
      ctx.setLineDash(spec.dashed ? [5, 3] : []);
      ctx.beginPath();
      let started = false;
      for (const p of this.points) {
        const v = p.values[idx];
        if (v === undefined || Number.isNaN(v)) continue;
        if (started) ctx.lineTo(x(p.t), y(v));
        else {
          ctx.moveTo(x(p.t), y(v));
          started = true;
        }
      }
      ctx.stroke();
    });
    ctx.setLineDash([]);

    ctx.fillStyle = "#9aa4b2";
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText(`${this.title}  [${lo.toFixed(1)}, ${hi.toFixed(1)}]`, 6, 12);
    this.series.forEach((spec, idx) => {
      ctx.fillStyle = spec.color;
      ctx.fillText(spec.label, 6 + 90 * idx, height - 6);
    });
  }
}
