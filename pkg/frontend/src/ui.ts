/** Thin DOM layer: renders ChatController snapshots into a chat column,
 * an input row, and a collapsible debug pane. */

import { debugPaneText } from "./debug.js";
import { ChatController, TranscriptEntry } from "./store.js";

export function mountChat(root: HTMLElement, controller: ChatController): void {
  root.innerHTML = `
    <div class="chat">
      <ol class="transcript"></ol>
      <form class="composer">
        <input type="text" autocomplete="off" placeholder="Say something" />
        <button type="submit">Send</button>
      </form>
      <label class="debug-toggle"><input type="checkbox" /> debug</label>
      <pre class="debug-pane" hidden></pre>
    </div>`;

  const list = root.querySelector<HTMLOListElement>(".transcript")!;
  const form = root.querySelector<HTMLFormElement>(".composer")!;
  const input = form.querySelector<HTMLInputElement>("input")!;
  const button = form.querySelector<HTMLButtonElement>("button")!;
  const toggle = root.querySelector<HTMLInputElement>(".debug-toggle input")!;
  const pane = root.querySelector<HTMLPreElement>(".debug-pane")!;

  const render = () => {
    list.replaceChildren(
      ...controller.transcript.map((entry) => bubble(entry)),
    );
    list.lastElementChild?.scrollIntoView?.({ block: "end" });
    input.disabled = button.disabled = controller.busy;
    if (controller.draft && !controller.busy && input.value === "") {
      input.value = controller.draft;
    }
    pane.hidden = !toggle.checked;
    pane.textContent = debugPaneText(controller.goals, controller.drsBox);
  };

  controller.onChange(render);
  toggle.addEventListener("change", render);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value;
    input.value = "";
    void controller.send(text);
  });
  render();
}

function bubble(entry: TranscriptEntry): HTMLLIElement {
  const li = document.createElement("li");
  li.className = `bubble ${entry.speaker}${entry.act === "error" ? " error" : ""}`;
  if (entry.speaker === "system" && entry.act) {
    const badge = document.createElement("span");
    badge.className = "act";
    badge.textContent = entry.act;
    li.appendChild(badge);
  }
  const text = document.createElement("span");
  text.className = "text";
  text.textContent = entry.text;
  li.appendChild(text);
  return li;
}
