import init, { residual_sweep, preconditioner_quality, bound_curves } from "./pkg/sketchpne_demo.js";

const COLORS = { qr: "#d62728", pne: "#1f77b4", hpne: "#17becf", pne_new: "#000", pne_old: "#2ca02c",
  hpne_new: "#555", hpne_old: "#98df8a" };

const num = (id) => Number(document.getElementById(id).value);
const str = (id) => document.getElementById(id).value;

function logPlot(canvas, x, series, legendEl) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 50;
  ctx.clearRect(0, 0, W, H);
  const vals = Object.values(series).flat().filter((v) => v != null && v > 0);
  let lo = Math.floor(Math.log10(Math.min(...vals))), hi = Math.ceil(Math.log10(Math.max(...vals)));
  if (lo === hi) hi += 1;
  const xl = Math.log10(x[0]), xh = Math.log10(x[x.length - 1]);
  const px = (v) => pad + (Math.log10(v) - xl) / (xh - xl) * (W - 2 * pad);
  const py = (v) => H - pad - (Math.log10(v) - lo) / (hi - lo) * (H - 2 * pad);
  ctx.strokeStyle = "#eee"; ctx.fillStyle = "#666"; ctx.font = "11px sans-serif";
  for (let e = lo; e <= hi; e += Math.max(1, Math.round((hi - lo) / 8))) {
    ctx.beginPath(); ctx.moveTo(pad, py(10 ** e)); ctx.lineTo(W - pad, py(10 ** e)); ctx.stroke();
    ctx.fillText(`1e${e}`, 4, py(10 ** e) + 4);
  }
  for (let e = Math.ceil(xl); e <= xh; e += 2) ctx.fillText(`1e${e}`, px(10 ** e) - 12, H - pad + 16);
  ctx.fillText("residual ratio", W / 2 - 30, H - 10);
  legendEl.innerHTML = "";
  for (const [name, ys] of Object.entries(series)) {
    ctx.strokeStyle = ctx.fillStyle = COLORS[name] || "#999";
    ctx.beginPath();
    let open = false;
    ys.forEach((y, i) => {
      if (y == null || !(y > 0)) { open = false; return; }
      const X = px(x[i]), Y = py(y);
      open ? ctx.lineTo(X, Y) : ctx.moveTo(X, Y);
      open = true;
      ctx.fillRect(X - 2, Y - 2, 4, 4);
    });
    ctx.stroke();
    legendEl.insertAdjacentHTML("beforeend", `<span style="color:${COLORS[name]}">■ ${name}</span>`);
  }
}

function guarded(fn, out) {
  return () => {
    try { fn(); } catch (e) { out.innerHTML = `<span class="err">${e.message || e}</span>`; }
  };
}

await init();

const swInfo = document.getElementById("sw-info");
document.getElementById("sw-run").onclick = guarded(() => {
  const r = JSON.parse(residual_sweep(num("sw-m"), num("sw-n"), num("sw-kappa"), str("sw-prec"), num("sw-points"), num("sw-seed")));
  const { rho, qr, pne, hpne, pne_new, pne_old, hpne_new, hpne_old } = r;
  logPlot(document.getElementById("sw-canvas"), rho, { qr, pne, hpne, pne_new, pne_old, hpne_new, hpne_old },
    document.getElementById("sw-legend"));
  swInfo.textContent = `preconditioner precision: ${r.precision ?? "n/a"}, κ(A_p) first point: ${r.kappa_ap?.toFixed(2) ?? "n/a"}`;
}, swInfo);

const qOut = document.getElementById("q-out");
document.getElementById("q-run").onclick = guarded(() => {
  const r = JSON.parse(preconditioner_quality(num("q-m"), num("q-n"), num("q-kappa"), num("q-d"), num("q-trials"), num("q-seed")));
  const lines = [`κ(A) = ${r.kappa_a.toExponential(3)}   κ₀ = ${r.kappa0.toFixed(2)}${r.overflowed ? " (overflowed)" : ""}   selected: ${r.selected}`, ""];
  for (const t of r.trials) {
    const ks = t.kappa_ap.map((k, i) => k == null ? `fail(${t.failures[i]})` : k.toFixed(2));
    lines.push(`${t.precision.padEnd(7)} κ(A_p): ${ks.join("  ")}`);
  }
  qOut.textContent = lines.join("\n");
}, qOut);

const bLegend = document.getElementById("b-legend");
document.getElementById("b-run").onclick = guarded(() => {
  const r = JSON.parse(bound_curves(num("b-ka"), num("b-krs"), num("b-kap"), Number(str("b-u1")), 2 ** -52, 33));
  const { residual, pne_new, pne_old, hpne_new, hpne_old } = r;
  logPlot(document.getElementById("b-canvas"), residual, { pne_new, pne_old, hpne_new, hpne_old }, bLegend);
}, bLegend);

document.getElementById("b-run").click();
