import type { ViewModel, NodeView } from "./viewmodel";
import { formatProbability } from "./viewmodel";
import type { WhatIfView } from "./types";

// Evidence markers: filled dot = hard, half dot = soft, hollow ? = unobserved.
const MARKS: Record<NodeView["evidence"], string> = {
  "hard-true": "●1",
  "hard-false": "●0",
  soft: "◐",
  none: "?",
};

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function nodeBox(node: NodeView): string {
  const classes = ["node"];
  if (node.suggested) classes.push("suggested");
  if (node.focused) classes.push("focused");
  if (node.isLeaf) classes.push("leaf");
  const badge = node.decision
    ? `<span class="badge badge-${node.decision === "+" ? "pos" : node.decision === "-" ? "neg" : "und"}">${node.decision}</span>`
    : "";
  const mark = node.evidence === "soft" && node.evidenceValue !== null
    ? `${MARKS.soft}${formatProbability(node.evidenceValue)}`
    : MARKS[node.evidence];
  return `
    <div class="${classes.join(" ")}" id="node-${node.id}" data-node="${node.id}">
      <div class="node-head">
        <span class="mark">${mark}</span>
        <span class="node-id">${node.id}</span>
        ${badge}
      </div>
      <div class="node-label">${escapeHtml(node.label)}</div>
      <div class="bar-track"><div class="bar" style="width:${node.barPercent}%"></div></div>
      <span class="posterior">${node.display}</span>
    </div>`;
}

export function renderSession(container: HTMLElement, vm: ViewModel): void {
  const levels = vm.levels
    .map(
      (nodes, i) => `
      <div class="level" data-level="${i + 1}">
        ${nodes.map(nodeBox).join("")}
      </div>`,
    )
    .join("");

  const history = vm.history
    .map(
      (entry) =>
        `<li>${entry.node} = ${entry.value}${entry.cost !== 1 ? ` (cost ${entry.cost})` : ""}</li>`,
    )
    .join("");

  const decisions = vm.decisions
    ? `<div id="decisions" class="decisions">
        session terminated:
        ${Object.entries(vm.decisions)
          .map(([node, d]) => `<span class="decision" data-node="${node}">${node}: ${d}</span>`)
          .join(" ")}
      </div>`
    : "";

  const prompt = vm.suggestion
    ? `next suggested observation: <strong id="suggestion">${vm.suggestion}</strong>`
    : `<span id="suggestion" class="done">nothing left to ask</span>`;

  container.innerHTML = `
    <header>
      <span id="session-network">${vm.network}</span>
      <span id="session-strategy">${escapeHtml(vm.strategyLabel)}</span>
      <span id="status" class="status-${vm.status}">${vm.status}</span>
    </header>
    <div class="tree" id="tree">${levels}</div>
    ${decisions}
    <div class="prompt">${prompt}</div>
    <div class="stats">${vm.queryCount} observations, total cost ${vm.totalCost}</div>
    <ol id="history">${history}</ol>`;
}

export function renderWhatIf(
  panel: HTMLElement,
  preview: WhatIfView,
  current: Record<string, number>,
  nodeOrder: string[],
): void {
  const rows = nodeOrder
    .map(
      (id) => `
      <tr data-node="${id}">
        <td>${id}</td>
        <td class="wi-current">${formatProbability(current[id])}</td>
        <td class="wi-true">${formatProbability(preview.if_true[id])}</td>
        <td class="wi-false">${formatProbability(preview.if_false[id])}</td>
      </tr>`,
    )
    .join("");
  panel.innerHTML = `
    <div class="whatif-head">
      what if <strong>${preview.node}</strong> were observed
      <span class="ev">(EV ${preview.ev_score.toFixed(3)})</span>
      <button id="whatif-close" type="button">close</button>
    </div>
    <table>
      <thead><tr><th>node</th><th>current</th><th>if true</th><th>if false</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
  panel.hidden = false;
}

export function clearWhatIf(panel: HTMLElement): void {
  panel.innerHTML = "";
  panel.hidden = true;
}

export function renderError(banner: HTMLElement, message: string | null): void {
  if (message === null) {
    banner.hidden = true;
    banner.textContent = "";
  } else {
    banner.hidden = false;
    banner.textContent = message;
  }
}
