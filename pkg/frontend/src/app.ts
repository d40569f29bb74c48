/** DOM wiring for the validator page. */

import type { Format } from "./api.js";
import { canCheck, canPublish, canTransform, Controller, EditorState } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function mount(): Controller {
  const editor = el<HTMLTextAreaElement>("editor");
  const formatSel = el<HTMLSelectElement>("format");
  const refInput = el<HTMLInputElement>("ref");
  const loadBtn = el<HTMLButtonElement>("load");
  const fileInput = el<HTMLInputElement>("file");
  const checkBtn = el<HTMLButtonElement>("check");
  const toTrigBtn = el<HTMLButtonElement>("to-trig");
  const toNquadsBtn = el<HTMLButtonElement>("to-nquads");
  const publishBtn = el<HTMLButtonElement>("publish");
  const banner = el<HTMLDivElement>("banner");
  const issues = el<HTMLUListElement>("issues");

  const render = (s: EditorState) => {
    if (editor.value !== s.content) editor.value = s.content;
    formatSel.value = s.format;
    checkBtn.disabled = !canCheck(s);
    toTrigBtn.disabled = !canTransform(s);
    toNquadsBtn.disabled = !canTransform(s);
    publishBtn.disabled = !canPublish(s);
    loadBtn.disabled = s.busy;

    banner.textContent = s.banner ? s.banner.text : "";
    banner.className = s.banner ? `banner ${s.banner.kind}` : "banner";

    issues.replaceChildren();
    if (s.lastCheck && s.checkedContent === s.content) {
      for (const issue of s.lastCheck.issues) {
        const li = document.createElement("li");
        li.textContent = issue.graph
          ? `${issue.rule}: ${issue.message} (${issue.graph})`
          : `${issue.rule}: ${issue.message}`;
        issues.appendChild(li);
      }
    }
  };

  const ctrl = new Controller(undefined, render);
  render(ctrl.state);

  editor.addEventListener("input", () => ctrl.edit(editor.value));
  formatSel.addEventListener("change", () =>
    ctrl.setFormat(formatSel.value as Format),
  );
  checkBtn.addEventListener("click", () => void ctrl.runCheck());
  toTrigBtn.addEventListener("click", () => void ctrl.runTransform("trig"));
  toNquadsBtn.addEventListener("click", () => void ctrl.runTransform("nquads"));
  publishBtn.addEventListener("click", () => void ctrl.runPublish());
  loadBtn.addEventListener("click", () => void ctrl.loadFromRef(refInput.value));
  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    void file.text().then((text) => ctrl.edit(text, "file"));
  });

  return ctrl;
}

if (typeof document !== "undefined" && document.getElementById("editor")) {
  mount();
}
