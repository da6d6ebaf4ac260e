/** DOM rendering: one screen per state, re-rendered after every change. */

import { SessionFlow } from "./flow.js";

export interface ViewOptions {
  /** Instruction text shown before the questions; overridable per study. */
  instructions?: string[];
}

const DEFAULT_INSTRUCTIONS = [
  "You will be shown pairs of identifier names taken from real programs, " +
    "followed by short code snippets with blanks.",
  "Related means the two names are associated: they may belong to the same " +
    "domain, describe the same kind of thing, or be opposites of each other.",
  "Substitutable means one name could replace the other in a program " +
    "without changing the meaning of the code.",
  "First you will rate 18 pairs on both scales, then pick the better-fitting " +
    "identifier for 15 code snippets. There is no back button, so answer " +
    "each question before moving on.",
];

const SCALE = [1, 2, 3, 4, 5];

export function render(flow: SessionFlow, root: HTMLElement, options: ViewOptions = {}): void {
  root.textContent = "";
  const rerender = () => render(flow, root, options);

  switch (flow.screen.kind) {
    case "instructions":
      root.appendChild(instructionsScreen(flow, rerender, options));
      break;
    case "direct":
      root.appendChild(directScreen(flow, rerender));
      break;
    case "indirect":
      root.appendChild(indirectScreen(flow, rerender));
      break;
    case "done":
      root.appendChild(doneScreen());
      break;
  }
}

function element<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function instructionsScreen(
  flow: SessionFlow,
  rerender: () => void,
  options: ViewOptions,
): HTMLElement {
  const screen = element("div", "screen instructions");
  screen.appendChild(element("h1", undefined, "Identifier survey"));
  for (const paragraph of options.instructions ?? DEFAULT_INSTRUCTIONS) {
    screen.appendChild(element("p", undefined, paragraph));
  }
  const begin = element("button", "begin", "Begin");
  begin.addEventListener("click", () => {
    flow.beginQuestions();
    rerender();
  });
  screen.appendChild(begin);
  return screen;
}

function progressBar(flow: SessionFlow): HTMLElement {
  const { answered, total } = flow.progress();
  return element("div", "progress", `Question ${Math.min(answered + 1, total)} of ${total}`);
}

function messageBanner(flow: SessionFlow): HTMLElement | null {
  if (!flow.message) return null;
  return element("div", "message", flow.message);
}

function scaleRow(
  name: string,
  leftLabel: string,
  rightLabel: string,
  selected: number | null,
  onSelect: (value: number) => void,
): HTMLElement {
  const row = element("div", `scale scale-${name}`);
  row.appendChild(element("span", "scale-label left", leftLabel));
  for (const value of SCALE) {
    const label = element("label");
    const input = element("input") as HTMLInputElement;
    input.type = "radio";
    input.name = name;
    input.value = String(value);
    input.checked = selected === value;
    input.addEventListener("change", () => onSelect(value));
    label.appendChild(input);
    row.appendChild(label);
  }
  row.appendChild(element("span", "scale-label right", rightLabel));
  return row;
}

function submitButton(flow: SessionFlow, rerender: () => void): HTMLElement {
  const button = element("button", "next", "Next");
  button.addEventListener("click", () => {
    void flow.submit().then(rerender);
  });
  return button;
}

function directScreen(flow: SessionFlow, rerender: () => void): HTMLElement {
  const session = flow.session!;
  const index = (flow.screen as { index: number }).index;
  const question = session.direct[index];

  const screen = element("div", "screen direct");
  screen.appendChild(progressBar(flow));
  const pair = element("p", "pair");
  pair.appendChild(element("span", undefined, "Identifiers: "));
  pair.appendChild(element("code", "identifier", question.id1));
  pair.appendChild(element("span", undefined, ", "));
  pair.appendChild(element("code", "identifier", question.id2));
  screen.appendChild(pair);

  screen.appendChild(element("p", "prompt", "1) How related are the identifiers?"));
  screen.appendChild(
    scaleRow("relatedness", "Unrelated", "Related", flow.relatedness, (value) => {
      flow.selectRelatedness(value);
      rerender();
    }),
  );
  screen.appendChild(element("p", "prompt", "2) Could one substitute the other?"));
  screen.appendChild(
    scaleRow(
      "similarity",
      "Not substitutable",
      "Substitutable",
      flow.similarity,
      (value) => {
        flow.selectSimilarity(value);
        rerender();
      },
    ),
  );
  const banner = messageBanner(flow);
  if (banner) screen.appendChild(banner);
  screen.appendChild(submitButton(flow, rerender));
  return screen;
}

function indirectScreen(flow: SessionFlow, rerender: () => void): HTMLElement {
  const session = flow.session!;
  const index = (flow.screen as { index: number }).index;
  const question = session.indirect[index];

  const screen = element("div", "screen indirect");
  screen.appendChild(progressBar(flow));
  screen.appendChild(
    element("p", "prompt", "Which identifier fits best into the blanks?"),
  );

  const choices = element("div", "choices");
  for (const slot of flow.choiceOrder) {
    const text = slot === "id1" ? question.id1 : question.id2;
    const label = element("label", "choice");
    const input = element("input") as HTMLInputElement;
    input.type = "radio";
    input.name = "chosen";
    input.value = slot;
    input.checked = flow.chosen === slot;
    input.addEventListener("change", () => {
      flow.selectChoice(slot);
      rerender();
    });
    label.appendChild(input);
    label.appendChild(element("code", "identifier", text));
    choices.appendChild(label);
  }
  screen.appendChild(choices);

  // Blanks arrive pre-rendered (____) and identical for every occurrence.
  const code = element("pre", "code");
  code.textContent = question.lines.join("\n");
  screen.appendChild(code);

  const banner = messageBanner(flow);
  if (banner) screen.appendChild(banner);
  screen.appendChild(submitButton(flow, rerender));
  return screen;
}

function doneScreen(): HTMLElement {
  const screen = element("div", "screen done");
  screen.appendChild(element("h1", undefined, "All done"));
  screen.appendChild(
    element("p", undefined, "Thank you! All 33 answers have been recorded."),
  );
  return screen;
}
