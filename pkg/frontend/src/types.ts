/** Wire types of the pldiag HTTP/JSON session contract. */

/** A term: either a variable or a compound, always with canonical text. */
export interface VarTerm {
  text: string;
  var: string;
}

export interface CompoundTerm {
  functor: string;
  args: TermJson[];
  text: string;
}

export type TermJson = VarTerm | CompoundTerm;

export function isVarTerm(t: TermJson): t is VarTerm {
  return typeof (t as VarTerm).var === "string";
}

export interface ProofTreeJson {
  atom: TermJson;
  clause: number;
  children: ProofTreeJson[];
}

export interface QuestionJson {
  atom: TermJson;
  context: string;
  role: string;
  seq: number;
}

export interface QuestionLogEntry {
  atom: string;
  role: string;
  seq: number;
  source: string;
  value: string;
}

export interface ResultDoc {
  status: string;
  kind: string;
  questions: QuestionLogEntry[];
  // incorrectness
  clause?: number;
  error?: { head: TermJson; body: TermJson[] };
  // incompleteness
  procedure?: string;
  witness?: TermJson;
  incorrect_answer_hints?: string[];
  entries_per_level?: number[];
  questions_per_level?: number[];
  // undecided / not-a-symptom / truncated
  reason?: string;
  detail?: string;
  frontier?: TermJson | null;
}

export interface SessionView {
  id: string;
  kind: string;
  state: "running" | "awaiting_answer" | "done" | "undecided";
  pending_question: QuestionJson | null;
  answers_given: number;
  result: ResultDoc | null;
}

export interface TraceEntryJson {
  invocation: number;
  call: TermJson;
  answers: TermJson[];
}

export type Verdict = "yes" | "no" | "unknown";
