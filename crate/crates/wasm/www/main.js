import init, { zonalAll, hypergeometric, fractionalPower } from "./pkg/mvfrac_wasm.js";

const field = (section, name) => section.querySelector(`[name=${name}]`).value;

function show(section, text, render) {
  const out = section.querySelector(".out");
  const result = JSON.parse(text);
  if (result.error) {
    out.innerHTML = `<pre class="error">${result.error.kind}: ${result.error.message}</pre>`;
    return null;
  }
  out.innerHTML = render(result);
  return result;
}

const fmt = (x) => (Number.isFinite(x) ? x.toPrecision(12) : String(x));

function zonal(section) {
  const text = zonalAll(Number(field(section, "k")), field(section, "eigs"));
  show(section, text, (r) => {
    const rows = r.polynomials
      .map((c) => `<tr><td>(${c.partition.join(",")})</td><td>${fmt(c.value)}</td></tr>`)
      .join("");
    return `<table><tr><th>K</th><th>C<sub>K</sub>(Z)</th></tr>${rows}</table>
      <pre>sum        ${fmt(r.sum)}\n(tr Z)^k   ${fmt(r.trace_power)}</pre>`;
  });
}

function plotWeights(canvas, sums) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const logs = sums.map((s) => Math.log10(Math.max(Math.abs(s), 1e-300)));
  const lo = Math.min(...logs), hi = Math.max(...logs);
  const span = hi - lo || 1;
  const step = canvas.width / Math.max(logs.length, 1);
  ctx.fillStyle = "#4a7";
  logs.forEach((v, k) => {
    const h = 8 + ((v - lo) / span) * (canvas.height - 16);
    ctx.fillRect(k * step + 1, canvas.height - h, step - 2, h);
  });
  ctx.fillStyle = "#555";
  ctx.fillText(`log10 |weight sum|, k = 0..${logs.length - 1}`, 6, 12);
}

function hyper(section) {
  const text = hypergeometric(
    field(section, "num"),
    field(section, "den"),
    field(section, "eigs"),
    Number(field(section, "kmax")),
  );
  const r = show(section, text, (r) =>
    `<pre>value          ${fmt(r.value)}
tail estimate  ${fmt(r.tail_estimate)}
last ratio     ${fmt(r.ratio)}
converged      ${r.converged}</pre>`);
  const canvas = section.querySelector("canvas");
  if (r) plotWeights(canvas, r.weight_sums);
  else canvas.getContext("2d").clearRect(0, 0, canvas.width, canvas.height);
}

function power(section) {
  const text = fractionalPower(
    Number(field(section, "alpha")),
    Number(field(section, "eta")),
    Number(field(section, "r")),
    field(section, "eigs"),
  );
  show(section, text, (r) =>
    `<pre>value            ${fmt(r.value)}
log magnitude    ${fmt(r.log_magnitude)}
power of |Z|     ${fmt(r.det_exponent)}</pre>`);
}

await init();
for (const [id, update] of [["zonal", zonal], ["hyper", hyper], ["power", power]]) {
  const section = document.getElementById(id);
  section.addEventListener("input", () => update(section));
  update(section);
}
