import init, { v1_boundary, regularized_trace, fermi_b_scan } from "./pkg/whlab_web.js";

const $ = (id) => document.getElementById(id);

function show(el, fn) {
  el.classList.remove("err");
  try {
    el.textContent = JSON.stringify(JSON.parse(fn()), null, 2);
  } catch (e) {
    el.classList.add("err");
    el.textContent = String(e.message ?? e);
  }
}

function scanTable(json) {
  const { rows, limit } = JSON.parse(json);
  const body = rows
    .map((r) => `<tr><td>${r.T}</td><td>${r.b.toFixed(6)}</td><td>${r.ratio.toFixed(5)}</td><td>${(100 * Math.abs(r.ratio - limit) / limit).toFixed(1)}%</td></tr>`)
    .join("");
  return `<table><tr><th>T</th><th>𝓑</th><th>𝓑/log(1/T)</th><th>gap to ${limit.toFixed(5)}</th></tr>${body}</table>`;
}

await init();

$("v1-run").onclick = () =>
  show($("v1-out"), () => v1_boundary($("v1-lambda").value, $("v1-omega").value, Number($("v1-nodes").value)));

$("tr-run").onclick = () =>
  show($("tr-out"), () =>
    regularized_trace($("tr-symbol").value, $("tr-region").value, Number($("tr-alpha").value), $("tr-f").value, Number($("tr-rows").value)),
  );

$("b-run").onclick = () => {
  const out = $("b-out");
  out.classList.remove("err");
  try {
    const temps = Float64Array.from($("b-temps").value.split(",").map(Number));
    out.innerHTML = scanTable(fermi_b_scan(temps, 1.0, $("b-f").value));
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e.message ?? e);
  }
};
