/** Browser entry point: wires the form, question card, proof tree, and
 * result card to a single active diagnosis session. */

import { ApiError, Client } from "./api.js";
import { SessionController, type UiState } from "./session.js";
import { termToText } from "./term.js";
import { renderProofTree } from "./tree.js";
import type { ResultDoc, Verdict } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderResultCard(doc: ResultDoc): HTMLElement {
  const card = document.createElement("div");
  card.className = "result-card";
  const h = document.createElement("h3");
  const body = document.createElement("pre");
  if (doc.status === "located" && doc.kind === "incorrectness" && doc.error) {
    h.textContent = `incorrectness error in clause ${doc.clause}`;
    const head = termToText(doc.error.head);
    const bodyAtoms = doc.error.body.map(termToText);
    body.textContent =
      bodyAtoms.length === 0 ? `${head}.` : `${head} :- ${bodyAtoms.join(", ")}.`;
  } else if (doc.status === "located" && doc.witness) {
    h.textContent = `incompleteness error in procedure ${doc.procedure}`;
    const hints = (doc.incorrect_answer_hints ?? []).map(
      (a) => `\nhint: incorrect answer ${a} seen; consider an incorrectness session`,
    );
    body.textContent = `uncovered atom: ${termToText(doc.witness)}${hints.join("")}`;
  } else if (doc.status === "undecided") {
    h.textContent = "undecided";
    body.textContent = `${doc.reason ?? ""}${doc.frontier ? ` (frontier: ${termToText(doc.frontier)})` : ""}`;
  } else {
    h.textContent = doc.status;
    body.textContent = doc.detail ?? "";
  }
  card.appendChild(h);
  card.appendChild(body);
  return card;
}

export function main(): void {
  const client = new Client("");
  let controller: SessionController | null = null;

  const status = el<HTMLDivElement>("status");
  const questionCard = el<HTMLDivElement>("question");
  const resultCard = el<HTMLDivElement>("result");
  const treeBox = el<HTMLDivElement>("prooftree");
  const historyBox = el<HTMLUListElement>("history");

  async function renderTree(sessionId: string, highlight: string | null) {
    try {
      const doc = await client.getProofTree(sessionId);
      treeBox.replaceChildren(renderProofTree(doc, highlight));
    } catch (e) {
      if (e instanceof ApiError) {
        treeBox.textContent = `no proof tree: ${e.detail}`;
      }
    }
  }

  function render(sessionId: string, state: UiState): void {
    if (state.phase === "loading") {
      status.textContent = "loading…";
      return;
    }
    if (state.phase === "lost") {
      status.textContent = state.reason;
      questionCard.replaceChildren();
      return;
    }
    const { view, busy, toast } = state;
    status.textContent = `session ${view.id} — ${view.state}${toast ? ` — ${toast}` : ""}`;
    questionCard.replaceChildren();
    if (view.state === "awaiting_answer" && view.pending_question) {
      const q = view.pending_question;
      const p = document.createElement("p");
      p.textContent = `[${q.role}] is ${termToText(q.atom)} intended?  (${q.context})`;
      questionCard.appendChild(p);
      for (const v of ["yes", "no", "unknown"] as Verdict[]) {
        const b = document.createElement("button");
        b.textContent = v;
        b.disabled = busy;
        b.addEventListener("click", () => void controller?.answerFlow(v));
        questionCard.appendChild(b);
      }
      void renderTree(view.id, q.atom.text);
    }
    resultCard.replaceChildren();
    if (view.result) {
      resultCard.appendChild(renderResultCard(view.result));
      void renderTree(view.id, null);
    }
    historyBox.replaceChildren(
      ...(controller?.history ?? []).map((r) => {
        const li = document.createElement("li");
        li.textContent = `#${r.seq} ${r.atom} — ${r.verdict}`;
        return li;
      }),
    );
  }

  el<HTMLFormElement>("setup").addEventListener("submit", (ev) => {
    ev.preventDefault();
    void (async () => {
      try {
        const program = await client.createProgram(el<HTMLTextAreaElement>("program").value);
        const spec = await client.createSpec(el<HTMLTextAreaElement>("spec").value);
        const view = await client.createSession({
          program_id: program.id,
          spec_id: spec.id,
          kind: el<HTMLSelectElement>("kind").value as "corr" | "compl",
          query: el<HTMLInputElement>("query").value,
        });
        controller?.stopPolling();
        controller = new SessionController(client, view.id);
        controller.onChange((s) => render(view.id, s));
        await controller.refresh();
        controller.startPolling();
      } catch (e) {
        status.textContent = e instanceof Error ? e.message : String(e);
      }
    })();
  });
}

main();
