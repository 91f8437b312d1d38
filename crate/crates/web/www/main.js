import init, { integral_curve, projector_a0, trace_fit } from "./pkg/heatkernel_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function linspace(lo, hi, n) {
  return Array.from({ length: n }, (_, i) => lo + ((hi - lo) * i) / (n - 1));
}

// series: [{ xs, ys, color, dots }]
function plot(canvas, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 50;
  ctx.clearRect(0, 0, W, H);
  const fx = logX ? Math.log10 : (v) => v;
  const fy = logY ? Math.log10 : (v) => v;
  const xs = series.flatMap((s) => s.xs.map(fx));
  const ys = series.flatMap((s) => s.ys.map(fy));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const px = (v) => pad + ((fx(v) - x0) / (x1 - x0)) * (W - 2 * pad);
  const py = (v) => H - pad - ((fy(v) - y0) / (y1 - y0)) * (H - 2 * pad);

  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.font = "12px system-ui";
  const tick = (v, log) => (log ? "1e" + v.toFixed(1) : v.toPrecision(3));
  ctx.fillText(tick(y1, logY), 4, pad + 4);
  ctx.fillText(tick(y0, logY), 4, H - pad);
  ctx.fillText(tick(x0, logX), pad, H - pad + 16);
  ctx.fillText(tick(x1, logX), W - pad - 30, H - pad + 16);

  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.dots) {
      s.xs.forEach((x, i) => {
        ctx.beginPath();
        ctx.arc(px(x), py(s.ys[i]), 3, 0, 2 * Math.PI);
        ctx.fill();
      });
    } else {
      ctx.beginPath();
      s.xs.forEach((x, i) => (i ? ctx.lineTo(px(x), py(s.ys[i])) : ctx.moveTo(px(x), py(s.ys[i]))));
      ctx.stroke();
    }
  }
}

function guarded(msgId, f) {
  return () => {
    $(msgId).textContent = "";
    $(msgId).className = "";
    try {
      f();
    } catch (e) {
      $(msgId).textContent = String(e.message ?? e);
      $(msgId).className = "err";
    }
  };
}

function drawCurve() {
  const fixed = $("c-r").value.split(",").map((s) => parseFloat(s)).filter((v) => !Number.isNaN(v));
  const lo = num("c-lo"), hi = num("c-hi"), n = 200;
  const ys = integral_curve(num("c-d"), num("c-p"), new Float64Array(fixed), lo, hi, n);
  plot($("c-plot"), [{ xs: linspace(lo, hi, n), ys: Array.from(ys), color: "#1565c0" }], { logY: true });
  $("c-msg").textContent = `alpha = ${num("c-d") / 2 + num("c-p")}, k = ${fixed.length}`;
}

function drawFit() {
  const f = trace_fit(num("f-a"), num("f-b"), num("f-c"), num("f-w"));
  const ts = Array.from(f.ts()), traces = Array.from(f.traces());
  const model = ts.map((t) => (f.engine_a0 + f.engine_a1 * t) / t);
  plot($("f-plot"), [
    { xs: ts, ys: traces, color: "#c62828", dots: true },
    { xs: ts, ys: model, color: "#1565c0" },
  ], { logX: true, logY: true });
  const row = (name, fit, unc, engine) =>
    `${name}  fit ${fit.toExponential(10)} ± ${unc.toExponential(1)}   engine ${engine.toExponential(10)}`;
  $("f-out").textContent = [
    row("a0", f.fit_a0, f.fit_a0_uncertainty, f.engine_a0),
    row("a1", f.fit_a1, f.fit_a1_uncertainty, f.engine_a1),
  ].join("\n");
  f.free();
}

function drawProjector() {
  const lo = num("z-lo"), hi = num("z-hi"), n = 25;
  const v = Array.from(projector_a0(num("z-d"), lo, hi, n));
  const zs = linspace(lo, hi, n);
  plot($("z-plot"), [
    { xs: zs, ys: v.slice(n), color: "#1565c0" },
    { xs: zs, ys: v.slice(0, n), color: "#c62828", dots: true },
  ]);
}

await init();
const curve = guarded("c-msg", drawCurve);
const fit = guarded("f-out", drawFit);
const proj = guarded("z-msg", drawProjector);
$("c-go").onclick = curve;
$("f-go").onclick = fit;
$("z-go").onclick = proj;
curve();
fit();
proj();
