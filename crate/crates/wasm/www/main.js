import init, { selfTrainingDemo, divisorSweep, confusionRates } from "./pkg/semisup_wasm.js";

const GRID = 60;
const NO = [52, 101, 164];
const YES = [230, 126, 34];

function values(form) {
  const out = {};
  for (const input of document.querySelectorAll(`#${form} input`)) out[input.name] = Number(input.value);
  return out;
}

function mix(p) {
  return NO.map((c, i) => Math.round(c + (YES[i] - c) * p));
}

// Data coordinates in [-1, 1] to canvas pixels, with y pointing up.
function toPx(canvas, x, y) {
  return [((x + 1) / 2) * canvas.width, ((1 - y) / 2) * canvas.height];
}

function drawSurface(canvas, surface) {
  const ctx = canvas.getContext("2d");
  const n = surface.resolution;
  const cw = canvas.width / (n - 1);
  const ch = canvas.height / (n - 1);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const [r, g, b] = mix(surface.values[i * n + j]);
      ctx.fillStyle = `rgba(${r},${g},${b},0.35)`;
      const [px, py] = toPx(canvas, -1 + (2 * j) / (n - 1), -1 + (2 * i) / (n - 1));
      ctx.fillRect(px - cw / 2, py - ch / 2, cw + 1, ch + 1);
    }
  }
}

function color(label) {
  const [r, g, b] = label === "yes" ? YES : NO;
  return `rgb(${r},${g},${b})`;
}

function drawPoints(canvas, points, showAbsorbed) {
  const ctx = canvas.getContext("2d");
  for (const p of points) {
    const [x, y] = toPx(canvas, p.x, p.y);
    ctx.beginPath();
    if (p.role === "test") {
      ctx.strokeStyle = color(p.class);
      ctx.moveTo(x - 3, y - 3); ctx.lineTo(x + 3, y + 3);
      ctx.moveTo(x + 3, y - 3); ctx.lineTo(x - 3, y + 3);
      ctx.stroke();
    } else if (p.role === "labeled") {
      ctx.fillStyle = color(p.class);
      ctx.strokeStyle = "#000";
      ctx.arc(x, y, 6, 0, 2 * Math.PI);
      ctx.fill(); ctx.stroke();
    } else {
      ctx.arc(x, y, 3.5, 0, 2 * Math.PI);
      ctx.strokeStyle = "#444";
      ctx.fillStyle = showAbsorbed && p.absorbed_as ? color(p.absorbed_as) : "#ccc";
      ctx.fill(); ctx.stroke();
    }
  }
}

function pct(x) {
  return (100 * x).toFixed(2) + "%";
}

function runDemo() {
  const v = values("demo-form");
  const status = document.getElementById("demo-status");
  status.textContent = "training...";
  // let the status paint before the synchronous work starts
  setTimeout(() => {
    try {
      const demo = JSON.parse(selfTrainingDemo(v.rows, v.separation, v.labeled, v.threshold, v.cycles, v.seed, GRID));
      for (const [id, surface, absorbed] of [["sup", demo.supervised, false], ["ssl", demo.self_trained, true]]) {
        const canvas = document.getElementById(id);
        canvas.getContext("2d").clearRect(0, 0, canvas.width, canvas.height);
        drawSurface(canvas, surface);
        drawPoints(canvas, demo.points, absorbed);
      }
      document.getElementById("sup-cap").textContent = `labeled points only: test accuracy ${pct(demo.supervised_accuracy)}`;
      document.getElementById("ssl-cap").textContent = `self-trained: test accuracy ${pct(demo.self_trained_accuracy)}`;
      const wrong = demo.points.filter((p) => p.absorbed_as && p.absorbed_as !== p.class).length;
      const rows = demo.log.iterations
        .map((r) => `<tr><td>${r.iteration}</td><td>${r.pool_size}</td><td>${r.added}</td><td>${r.train_error?.toFixed(4) ?? ""}</td></tr>`)
        .join("");
      document.getElementById("log").innerHTML =
        `<tr><th>iteration</th><th>trained on</th><th>absorbed</th><th>training error</th></tr>${rows}`;
      status.textContent = `stopped: ${demo.log.termination.replaceAll("_", " ")}; ${wrong} absorbed points got the wrong label`;
    } catch (e) {
      status.textContent = String(e.message ?? e);
    }
  }, 10);
}

function runSweep() {
  const v = values("sweep-form");
  const status = document.getElementById("sweep-status");
  status.textContent = "running 12 self-training runs...";
  setTimeout(() => {
    try {
      const points = JSON.parse(divisorSweep(v.rows, v.features, v.separation, v.labeled, v.cycles, v.seed));
      drawSweep(document.getElementById("sweep"), points);
      status.textContent = "";
    } catch (e) {
      status.textContent = String(e.message ?? e);
    }
  }, 10);
}

function drawSweep(canvas, points) {
  const ctx = canvas.getContext("2d");
  const pad = 40;
  const w = canvas.width - 2 * pad;
  const h = canvas.height - 2 * pad;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const top = Math.max(10, Math.ceil(Math.max(...points.map((p) => p.error_percent)) / 10) * 10);
  const px = (x) => pad + ((x - 1) / 5) * w;
  const py = (e) => pad + h - (e / top) * h;
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#555";
  ctx.font = "11px system-ui";
  ctx.strokeRect(pad, pad, w, h);
  for (let x = 1; x <= 6; x++) ctx.fillText(`X=${x}`, px(x) - 10, pad + h + 15);
  for (let e = 0; e <= top; e += top / 5) ctx.fillText(`${e}%`, 4, py(e) + 4);
  for (const [variant, dash, rgb] of [["divided", [], NO], ["divided_plus_one", [6, 4], YES]]) {
    const line = points.filter((p) => p.variant === variant).sort((a, b) => a.divisor - b.divisor);
    ctx.strokeStyle = `rgb(${rgb.join(",")})`;
    ctx.setLineDash(dash);
    ctx.beginPath();
    line.forEach((p, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, px(p.divisor), py(p.error_percent)));
    ctx.stroke();
    ctx.setLineDash([]);
    for (const p of line) {
      ctx.fillStyle = ctx.strokeStyle;
      ctx.fillText(String(p.hidden_size), px(p.divisor) + 3, py(p.error_percent) - 4);
    }
  }
}

function updateRates() {
  const v = values("cm-form");
  const status = document.getElementById("cm-status");
  try {
    const r = JSON.parse(confusionRates(v.a, v.b, v.c, v.d));
    const names = ["accuracy (a+d)/total", "true positive d/(c+d)", "false positive b/(a+b)", "true negative a/(a+b)", "false negative c/(c+d)"];
    document.getElementById("rates").innerHTML = names
      .map((n, i) => `<tr><td>${n}</td><td>${r.percent[i]}${r.percent[i] === "undefined" ? "" : "%"}</td></tr>`)
      .join("");
    status.textContent = "";
  } catch (e) {
    status.textContent = String(e.message ?? e);
  }
}

await init();
document.getElementById("demo-run").addEventListener("click", runDemo);
document.getElementById("sweep-run").addEventListener("click", runSweep);
for (const input of document.querySelectorAll("#cm-form input")) input.addEventListener("input", updateRates);
updateRates();
runDemo();
