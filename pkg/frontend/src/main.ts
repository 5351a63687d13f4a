/** DOM wiring. All behavior lives in schema/state/player/export; this file
 * only builds elements and forwards events. Serve the directory statically
 * next to a session directory (session.json + stimuli/). */

import { parseSessionText, PublicSession, SchemaError } from "./schema.js";
import { SessionState } from "./state.js";
import { ConditionPlayer, WebAudioEngine, PlayerError } from "./player.js";

const SESSION_URL = "session.json";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function blockingError(root: HTMLElement, message: string): void {
  root.replaceChildren(
    el("h1", "error-title", "Cannot start the test"),
    el("p", "error-body", message),
  );
}

function download(filename: string, text: string): void {
  const blob = new Blob([text], { type: "application/x-ndjson" });
  const url = URL.createObjectURL(blob);
  const a = el("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}

async function loadStimuli(
  engine: WebAudioEngine,
  session: PublicSession,
  itemId: string,
): Promise<void> {
  const item = session.items.find((i) => i.itemId === itemId);
  if (!item) throw new PlayerError(`unknown item ${itemId}`);
  await Promise.all(item.stimuli.map((s) => engine.load(`${itemId}/${s.label}`, s.path)));
}

function renderPage(
  root: HTMLElement,
  state: SessionState,
  engine: WebAudioEngine,
  rerender: () => void,
): void {
  const itemId = state.currentItem;
  const labels = state.labelsFor(itemId);
  const player = new ConditionPlayer(
    engine,
    labels.map((label) => `${itemId}/${label}`),
  );

  const page = el("div", "page");
  page.append(
    el("h2", "page-title", `Excerpt ${state.pageIndex + 1} of ${state.numPages}`),
    el(
      "p",
      "instructions",
      "Listen to every version and rate its overall quality from 0 (bad) to " +
        "100 (excellent). You can switch versions while the audio plays.",
    ),
  );

  const list = el("div", "conditions");
  for (const label of labels) {
    const row = el("div", "condition-row");
    const playButton = el("button", "play", `Play ${label}`);
    playButton.addEventListener("click", () => {
      const key = `${itemId}/${label}`;
      if (player.current === key) {
        if (player.playing) player.pause();
        else player.resume();
      } else if (player.playing || player.current !== null) {
        player.switchTo(key);
      } else {
        player.play(key);
      }
      state.markAuditioned(itemId, label);
      rerender();
    });

    const slider = el("input") as HTMLInputElement;
    slider.type = "range";
    slider.min = String(state.session.scale.min);
    slider.max = String(state.session.scale.max);
    slider.step = "1";
    const existing = state.ratingOf(itemId, label);
    slider.value = existing === null ? "50" : String(existing);
    slider.disabled = !state.wasAuditioned(itemId, label);
    const value = el("span", "value", existing === null ? "-" : String(existing));
    slider.addEventListener("input", () => {
      const score = state.rate(itemId, label, Number(slider.value));
      value.textContent = String(score);
    });

    const status = el("span", "status", state.wasAuditioned(itemId, label) ? "" : "not heard");
    row.append(playButton, slider, value, status);
    list.append(row);
  }
  page.append(list);

  const nav = el("div", "nav");
  const prev = el("button", "prev", "Back");
  prev.disabled = state.pageIndex === 0;
  prev.addEventListener("click", () => {
    player.stop();
    state.prev();
    rerender();
  });
  const next = el("button", "next", "Next");
  next.disabled = !state.canAdvance;
  next.addEventListener("click", () => {
    player.stop();
    state.next();
    rerender();
  });
  const submit = el("button", "submit", "Submit ratings");
  submit.disabled = !state.canSubmit;
  submit.title = state.canSubmit
    ? ""
    : `still incomplete: ${state.incompleteItems().join(", ")}`;
  submit.addEventListener("click", () => {
    player.stop();
    download(`ratings_${state.listenerId}.jsonl`, state.submit());
    root.replaceChildren(el("h1", "done", "Thank you! Your ratings were exported."));
  });
  nav.append(prev, next, submit);
  page.append(nav);

  root.replaceChildren(page);
}

async function start(root: HTMLElement, session: PublicSession): Promise<void> {
  const form = el("div", "start");
  form.append(
    el("h1", "title", "Listening test"),
    el(
      "p",
      "instructions",
      "You will rate several versions of the same excerpt on a 0-100 scale. " +
        "One version per excerpt is the unprocessed original. Use headphones " +
        "in a quiet room.",
    ),
  );
  const input = el("input") as HTMLInputElement;
  input.placeholder = "listener id";
  const go = el("button", "go", "Start");
  form.append(input, go);
  root.replaceChildren(form);

  go.addEventListener("click", () => {
    const listenerId = input.value.trim();
    if (listenerId === "") {
      input.placeholder = "listener id is required";
      return;
    }
    const engine = new WebAudioEngine(new AudioContext());
    const state = new SessionState(session, listenerId, localStorage);
    const rerender = () => {
      loadStimuli(engine, session, state.currentItem)
        .then(() => renderPage(root, state, engine, rerender))
        .catch((exc: Error) => blockingError(root, exc.message));
    };
    rerender();
  });
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  try {
    const response = await fetch(SESSION_URL);
    if (!response.ok) {
      blockingError(root, `cannot fetch ${SESSION_URL}: HTTP ${response.status}`);
      return;
    }
    await start(root, parseSessionText(await response.text()));
  } catch (exc) {
    if (exc instanceof SchemaError) blockingError(root, exc.message);
    else blockingError(root, (exc as Error).message);
  }
}

void boot();
