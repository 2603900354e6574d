/** Interactive collapsible proof-tree rendering.
 *
 * Rendering is a pure function of the document plus the highlighted atom;
 * collapse state lives in the DOM (details/summary), local to the widget.
 * Malformed documents yield an error banner, never a crash.
 */

import { isTermJson, termToText } from "./term.js";
import type { ProofTreeJson } from "./types.js";

export function isProofTreeJson(doc: unknown): doc is ProofTreeJson {
  if (typeof doc !== "object" || doc === null) return false;
  const d = doc as Record<string, unknown>;
  return (
    typeof d.clause === "number" &&
    isTermJson(d.atom) &&
    Array.isArray(d.children) &&
    d.children.every(isProofTreeJson)
  );
}

export function renderProofTree(
  doc: unknown,
  highlightAtomText: string | null = null,
): HTMLElement {
  if (!isProofTreeJson(doc)) {
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = "proof tree document does not match the expected schema";
    return banner;
  }
  const root = document.createElement("div");
  root.className = "prooftree";
  root.appendChild(renderNode(doc, highlightAtomText));
  return root;
}

function renderNode(node: ProofTreeJson, highlight: string | null): HTMLElement {
  const text = termToText(node.atom);
  const label = document.createElement("span");
  label.className = "node-label";
  if (highlight !== null && node.atom.text === highlight) {
    label.classList.add("question-node");
  }
  label.textContent = `${text}  (clause ${node.clause})`;

  if (node.children.length === 0) {
    const leaf = document.createElement("div");
    leaf.className = "node leaf";
    leaf.appendChild(label);
    return leaf;
  }
  const details = document.createElement("details");
  details.className = "node";
  details.open = true;
  const summary = document.createElement("summary");
  summary.appendChild(label);
  details.appendChild(summary);
  for (const child of node.children) {
    details.appendChild(renderNode(child, highlight));
  }
  return details;
}
