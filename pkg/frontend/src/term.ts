/** Rendering of structured terms.
 *
 * Terms are rendered from the structured form (functor/args), not the
 * canonical text, so list sugar is re-applied consistently no matter how the
 * server spelled the term.
 */

import { isVarTerm, type TermJson } from "./types.js";

const NIL = "[]";
const CONS = ".";

export function termToText(t: TermJson): string {
  if (isVarTerm(t)) return t.var;
  if (t.functor === CONS && t.args.length === 2) return listToText(t);
  if (t.args.length === 0) return t.functor;
  return `${t.functor}(${t.args.map(termToText).join(",")})`;
}

function listToText(t: TermJson): string {
  const items: string[] = [];
  let cur: TermJson = t;
  while (!isVarTerm(cur) && cur.functor === CONS && cur.args.length === 2) {
    items.push(termToText(cur.args[0]!));
    cur = cur.args[1]!;
  }
  if (!isVarTerm(cur) && cur.functor === NIL && cur.args.length === 0) {
    return `[${items.join(",")}]`;
  }
  return `[${items.join(",")}|${termToText(cur)}]`;
}

/** Structural well-formedness check for term documents from the wire. */
export function isTermJson(doc: unknown): doc is TermJson {
  if (typeof doc !== "object" || doc === null) return false;
  const d = doc as Record<string, unknown>;
  if (typeof d.text !== "string") return false;
  if (typeof d.var === "string") return true;
  return (
    typeof d.functor === "string" &&
    Array.isArray(d.args) &&
    d.args.every(isTermJson)
  );
}
