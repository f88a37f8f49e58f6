import init, { presets_json, analyze, qexp, explore } from "./pkg/pfhodge_web.js";

const $ = (id) => document.getElementById(id);

function el(tag, attrs = {}, ...kids) {
  const e = document.createElement(tag);
  Object.assign(e, attrs);
  for (const k of kids) e.append(k);
  return e;
}

function table(head, rows) {
  const t = el("table");
  t.append(el("tr", {}, ...head.map((h) => el("th", { textContent: h }))));
  for (const r of rows) t.append(el("tr", {}, ...r.map((c) => el("td", { textContent: String(c) }))));
  return t;
}

function fail(out, e) {
  out.replaceChildren(el("p", { className: "error", textContent: String(e) }));
}

function monomial(e, c) {
  if (e === "0") return c;
  const q = e === "1" ? "q" : e.includes("/") || e.startsWith("-") ? `q^(${e})` : `q^${e}`;
  if (c === "1") return q;
  if (c === "-1") return `-${q}`;
  return `${c} ${q}`;
}

function series(terms, prec) {
  if (terms.length === 0) return `O(q^${prec})`;
  const s = terms.map(([e, c]) => monomial(e, c)).join(" + ").replaceAll("+ -", "- ");
  return `${s} + O(q^${prec})`;
}

function sci(x) {
  return Number(x).toExponential(3);
}

function cplx([re, im]) {
  const i = im < 0 ? `- ${Math.abs(im).toPrecision(10)}i` : `+ ${im.toPrecision(10)}i`;
  return `${re.toPrecision(10)} ${i}`;
}

function runAnalyze(ev) {
  ev?.preventDefault();
  const out = $("analyze-out");
  try {
    const r = JSON.parse(analyze($("op-src").value, $("op-var").value));
    const pts = r.points.map((p) => [p.point, p.exponents.join(", "), p.class, p.log_degree]);
    const b = r.bundle;
    const deg = b.degrees.map((d, k) => [k, d, b.parabolic_degrees[k]]);
    const split = r.splitting.map((d) => (d === 0 ? "O" : `O(${d})`)).join(" ⊕ ");
    out.replaceChildren(
      el("p", { className: "series", textContent: r.operator }),
      table(["point", "exponents", "class", "log degree"], pts),
      el("p", { textContent: `sum of exponents: ${r.fuchs_sum}` }),
      table(["k", "deg", "parabolic deg"], deg),
      el("p", { textContent: `splitting: ${split}` }),
      ...b.spread_flags.map((f) => el("p", { className: "bad", textContent: f })),
    );
  } catch (e) {
    fail(out, e);
  }
}

function runQexp(ev) {
  ev?.preventDefault();
  const out = $("qexp-out");
  const order = Number($("q-order").value);
  try {
    const r = JSON.parse(qexp($("q-level").value, order, $("q-expr").value));
    const line = (name, terms, pre) =>
      el("p", { className: "series", textContent: `${name} = ${pre && pre !== "1" ? pre + " · (" : ""}${series(terms, order)}${pre && pre !== "1" ? ")" : ""}` });
    const kids = [
      el("p", { textContent: `level ${r.level}, r = ${r.r}: A^${r.r} = B^${r.r} + C^${r.r}` }),
      line("A", r.A),
      line("B", r.B),
      line("C", r.C.terms, r.C.prefactor),
      line("E", r.E),
    ];
    if (r.expression) kids.push(line(r.expression.source, r.expression.terms, r.expression.prefactor));
    out.replaceChildren(...kids);
  } catch (e) {
    fail(out, e);
  }
}

function runTau(ev) {
  ev?.preventDefault();
  const out = $("tau-out");
  out.replaceChildren(el("p", { textContent: "computing…" }));
  setTimeout(() => {
    try {
      const t0 = performance.now();
      const r = JSON.parse(explore($("t-preset").value, $("t-tau").value, $("t-hbar").value, Number($("t-order").value), Number($("t-bits").value)));
      const ms = Math.round(performance.now() - t0);
      const s = r.sample;
      const g = r.residuals;
      const vals = [
        ["z(τ)", cplx(s.z)],
        ["dz/dτ", cplx(s.dz_dtau)],
        ["period", cplx(s.period)],
        ["K", cplx(s.k)],
        ["K_u", cplx(s.k_u)],
        ["metric G", cplx(s.metric)],
        ["Γ", cplx(s.christoffel)],
        ...s.b.map((b, i) => [`b${i}(z)`, cplx(b)]),
        ["series tail (log10)", s.tail_log10.toFixed(1)],
      ];
      const res = [
        ["gauge (1,0)", g.one_zero],
        ["gauge (0,1)", g.zero_one],
        ["Hitchin", g.hitchin],
        ...g.ring.map((x) => [x.name, x.value]),
        ["φ† from metric", g.phi_dagger_agreement],
        ["metric closed form", g.metric_agreement],
      ].map(([n, v]) => [n, sci(v), v < 1e-8 ? "pass" : "FAIL"]);
      out.replaceChildren(
        el("p", { textContent: `${r.kahler}  (${ms} ms)` }),
        table(["quantity", "value"], vals),
        table(["residual", "norm", "< 1e-8"], res),
      );
    } catch (e) {
      fail(out, e);
    }
  }, 0);
}

async function main() {
  await init();
  const p = JSON.parse(presets_json());
  for (const o of p.operators) $("op-preset").append(el("option", { value: o.name, textContent: o.name }));
  for (const n of p.geometry) $("t-preset").append(el("option", { value: n, textContent: n }));
  const pick = () => {
    const o = p.operators.find((x) => x.name === $("op-preset").value);
    $("op-src").value = o.operator;
    $("op-var").value = o.variable;
  };
  $("op-preset").addEventListener("change", () => { pick(); runAnalyze(); });
  $("analyze-form").addEventListener("submit", runAnalyze);
  $("qexp-form").addEventListener("submit", runQexp);
  $("tau-form").addEventListener("submit", runTau);
  pick();
  runAnalyze();
  runQexp();
  $("status").textContent = "ready";
}

main().catch((e) => {
  $("status").textContent = `failed to load: ${e}`;
});
