// Build with:
//   cargo build -p zeris-demo --release --target wasm32-unknown-unknown
//   wasm-bindgen --target web --out-dir crates/wasm/www/pkg target/wasm32-unknown-unknown/release/zeris_demo.wasm
import init, { errorPdf, outageCurve, efficiencyCurve } from "./pkg/zeris_demo.js";

const BLUE = "#1f5fbf";
const ORANGE = "#d0661a";

function rows(flat, stride) {
  const out = [];
  for (let i = 0; i + stride <= flat.length; i += stride) out.push(Array.from(flat.slice(i, i + stride)));
  return out;
}

function values(fs) {
  const v = {};
  for (const el of fs.querySelectorAll("input, select")) v[el.name] = el.type === "number" ? Number(el.value) : el.value;
  return v;
}

// series: [{ xs, ys, color }]; log puts y on a log10 axis
function plot(canvas, series, { log = false, xlabel = "", ylabel = "" } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, L = 60, B = 30, T = 10, R = 10;
  ctx.clearRect(0, 0, W, H);
  const fy = log ? (y) => Math.log10(Math.max(y, 1e-300)) : (y) => y;
  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const s of series) {
    s.xs.forEach((x) => { x0 = Math.min(x0, x); x1 = Math.max(x1, x); });
    s.ys.forEach((y) => { const v = fy(y); if (isFinite(v)) { y0 = Math.min(y0, v); y1 = Math.max(y1, v); } });
  }
  if (log) y0 = Math.max(y0, y1 - 12);
  if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
  const px = (x) => L + (W - L - R) * (x - x0) / (x1 - x0 || 1);
  const py = (y) => H - B - (H - B - T) * (Math.max(fy(y), y0) - y0) / (y1 - y0);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(L, T, W - L - R, H - B - T);
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toPrecision(3), L, H - B + 14);
  ctx.fillText(x1.toPrecision(3), W - R - 40, H - B + 14);
  ctx.fillText(xlabel, W / 2 - 20, H - 4);
  ctx.fillText(log ? "1e" + y1.toFixed(0) : y1.toPrecision(4), 2, T + 10);
  ctx.fillText(log ? "1e" + y0.toFixed(0) : y0.toPrecision(4), 2, H - B);
  ctx.fillText(ylabel, 2, H / 2);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    s.xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
    ctx.stroke();
  }
}

function guarded(fs, draw) {
  const err = fs.querySelector(".err");
  return () => {
    try {
      err.textContent = "";
      draw(values(fs), fs.querySelector("canvas"));
    } catch (e) {
      err.textContent = String(e.message || e);
    }
  };
}

function drawPdf(v, canvas) {
  const flat = errorPdf(v.kappa, v.rice, v.phase, v.bits, 401);
  const r = rows(flat, 2);
  const atom = r.pop();
  plot(canvas, [{ xs: r.map((p) => p[0]), ys: r.map((p) => p[1]), color: BLUE }], { xlabel: "epsilon", ylabel: "pdf" });
  const ctx = canvas.getContext("2d");
  ctx.fillStyle = "#333";
  ctx.fillText(`atom at ${atom[0].toFixed(3)} with weight ${atom[1].toFixed(4)}`, 70, 24);
}

function drawOutage(v, canvas) {
  const r = rows(outageCurve(v.side, v.scheme, v.bits, v.n, v.power, 200), 3);
  const xs = r.map((p) => p[0]);
  plot(canvas, [
    { xs, ys: r.map((p) => p[1]), color: BLUE },
    { xs, ys: r.map((p) => p[2]), color: ORANGE },
  ], { log: true, xlabel: v.scheme === "ts" ? "tau" : "N1/N", ylabel: "P_out" });
}

function drawEe(v, canvas) {
  const r = rows(efficiencyCurve(v.side, v.scheme, v.bits, v.from, v.to, v.power, 120), 3);
  const xs = r.map((p) => p[0]);
  plot(canvas, [
    { xs, ys: r.map((p) => p[1]), color: BLUE },
    { xs, ys: r.map((p) => p[2]), color: ORANGE },
  ], { xlabel: "N", ylabel: "bit/J/Hz" });
}

await init();
for (const [id, draw] of [["pdf", drawPdf], ["outage", drawOutage], ["ee", drawEe]]) {
  const fs = document.getElementById(id);
  const redraw = guarded(fs, draw);
  fs.addEventListener("change", redraw);
  redraw();
}
