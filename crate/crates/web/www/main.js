import init, { dressed_spectrum, g2_curve, transmission_curve } from "./pkg/blockade_web.js";

const $ = (id) => document.getElementById(id);

function rows(flat, width) {
  const out = [];
  for (let i = 0; i + width <= flat.length; i += width) out.push(Array.from(flat.slice(i, i + width)));
  return out;
}

// Draws each series as a polyline. `series` is a list of {points: [[x, y]], color}.
function plot(canvas, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  const pad = 44;
  ctx.clearRect(0, 0, width, height);
  const tx = (v) => (logX ? Math.log10(v) : v);
  const ty = (v) => (logY ? Math.log10(v) : v);
  const pts = series.flatMap((s) => s.points).filter(([x, y]) => isFinite(tx(x)) && isFinite(ty(y)));
  if (pts.length === 0) return;
  let [x0, x1] = [Math.min(...pts.map((p) => tx(p[0]))), Math.max(...pts.map((p) => tx(p[0])))];
  let [y0, y1] = [Math.min(...pts.map((p) => ty(p[1]))), Math.max(...pts.map((p) => ty(p[1])))];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) { y0 -= 0.5; y1 += 0.5; }
  const sx = (v) => pad + ((tx(v) - x0) / (x1 - x0)) * (width - 2 * pad);
  const sy = (v) => height - pad - ((ty(v) - y0) / (y1 - y0)) * (height - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, width - 2 * pad, height - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  const label = (v, log) => (log ? `1e${v.toFixed(1)}` : v.toFixed(2));
  ctx.fillText(label(x0, logX), pad, height - pad + 16);
  ctx.fillText(label(x1, logX), width - pad - 30, height - pad + 16);
  ctx.fillText(label(y0, logY), 2, height - pad);
  ctx.fillText(label(y1, logY), 2, pad + 10);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    let pen = false;
    for (const [x, y] of s.points) {
      if (!isFinite(tx(x)) || !isFinite(ty(y))) { pen = false; continue; }
      if (pen) ctx.lineTo(sx(x), sy(y)); else ctx.moveTo(sx(x), sy(y));
      pen = true;
    }
    ctx.stroke();
  }
}

function bind(ids, draw) {
  for (const id of ids) {
    const input = $(id);
    const out = $(`${id}-v`);
    const update = () => { if (out) out.textContent = input.value; draw(); };
    input.addEventListener("input", update);
    if (out) out.textContent = input.value;
  }
  draw();
}

function drawSpectrum() {
  const manifold = Number($("spec-manifold").value);
  const flat = dressed_spectrum(0.1, 10, 120, Number($("spec-omega").value), manifold);
  const table = rows(flat, manifold + 3);
  const colors = ["#226", "#c22", "#2a2", "#a6a"];
  const series = colors.slice(0, manifold + 2).map((color, k) => ({
    color,
    points: table.map((r) => [r[0], r[k + 1]]),
  }));
  plot($("spectrum"), series, { logX: true });
}

function drawG2() {
  const flat = g2_curve(0.2, 10, 40, Number($("g2-omega").value), Number($("g2-gfs").value), Number($("g2-dc").value));
  const table = rows(flat, 3);
  plot($("g2"), [
    { color: "#c22", points: table.map((r) => [r[0], r[1]]) },
    { color: "#226", points: table.map((r) => [r[0], r[2]]) },
  ], { logX: true, logY: true });
}

function drawTransmission() {
  const flat = transmission_curve(Number($("tr-kappa").value), Number($("tr-omega").value), 4, 321);
  const table = rows(flat, 5);
  const colors = ["#c22", "#e99", "#226", "#99c"];
  plot($("transmission"), colors.map((color, k) => ({ color, points: table.map((r) => [r[0], r[k + 1]]) })));
}

async function main() {
  try {
    await init();
  } catch (e) {
    $("status").textContent = `Could not load the WebAssembly module: ${e}`;
    return;
  }
  $("status").textContent = "";
  bind(["spec-omega"], drawSpectrum);
  $("spec-manifold").addEventListener("change", drawSpectrum);
  bind(["g2-omega", "g2-gfs", "g2-dc"], drawG2);
  bind(["tr-kappa", "tr-omega"], drawTransmission);
}

main();
