import { describe, expect, it } from "vitest";

import { isTermJson, termToText } from "../src/term.js";
import type { TermJson } from "../src/types.js";

const c = (functor: string, ...args: TermJson[]): TermJson => ({
  functor,
  args,
  text: "",
});
const v = (name: string): TermJson => ({ text: name, var: name });
const nil = c("[]");
const cons = (h: TermJson, t: TermJson) => c(".", h, t);

describe("termToText", () => {
  it("renders constants and variables", () => {
    expect(termToText(c("a"))).toBe("a");
    expect(termToText(c("0"))).toBe("0");
    expect(termToText(v("Xs"))).toBe("Xs");
  });

  it("renders compounds", () => {
    expect(termToText(c("s", c("s", c("0"))))).toBe("s(s(0))");
    expect(termToText(c("f", c("a"), v("X")))).toBe("f(a,X)");
  });

  it("re-sugars proper lists from the structured form", () => {
    expect(termToText(nil)).toBe("[]");
    expect(termToText(cons(c("1"), cons(c("2"), nil)))).toBe("[1,2]");
  });

  it("re-sugars partial lists with a tail", () => {
    expect(termToText(cons(c("1"), v("T")))).toBe("[1|T]");
    expect(termToText(cons(c("1"), cons(c("2"), v("T"))))).toBe("[1,2|T]");
  });

  it("renders nested lists inside compounds", () => {
    expect(termToText(c("app", nil, cons(c("a"), nil)))).toBe("app([],[a])");
  });
});

describe("isTermJson", () => {
  it("accepts both term shapes", () => {
    expect(isTermJson({ text: "X", var: "X" })).toBe(true);
    expect(isTermJson({ text: "a", functor: "a", args: [] })).toBe(true);
  });

  it("rejects malformed documents", () => {
    expect(isTermJson(null)).toBe(false);
    expect(isTermJson({ functor: "a", args: [] })).toBe(false); // no text
    expect(isTermJson({ text: "a", functor: "a", args: [{}] })).toBe(false);
    expect(isTermJson("even(0)")).toBe(false);
  });
});
