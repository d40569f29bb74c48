/** Editor state machine for the validator page.
 *
 * Pure logic, no DOM: the view layer renders from this state and calls
 * the action methods. Publishing is only reachable when the *latest*
 * check of the *current* buffer reported well-formed and trusty-valid,
 * and only one API call is in flight at a time.
 */

import * as api from "./api.js";

export type LoadSource = "paste" | "file" | "url" | "network";

export interface Banner {
  kind: "success" | "error" | "info";
  text: string;
}

export interface EditorState {
  content: string;
  format: api.Format;
  source: LoadSource;
  lastCheck: api.CheckResponse | null;
  /** content the last check was run against; a stale check never
   *  enables publishing */
  checkedContent: string | null;
  busy: boolean;
  banner: Banner | null;
}

export function initialState(): EditorState {
  return {
    content: "",
    format: "trig",
    source: "paste",
    lastCheck: null,
    checkedContent: null,
    busy: false,
    banner: null,
  };
}

export function canCheck(s: EditorState): boolean {
  return !s.busy && s.content.trim().length > 0;
}

export function canTransform(s: EditorState): boolean {
  return canCheck(s);
}

export function canPublish(s: EditorState): boolean {
  return (
    !s.busy &&
    s.lastCheck !== null &&
    s.lastCheck.wellFormed &&
    s.lastCheck.trusty === "valid" &&
    s.checkedContent === s.content
  );
}

export function setContent(
  s: EditorState,
  content: string,
  source: LoadSource = "paste",
): EditorState {
  // editing invalidates nothing retroactively, but a check result only
  // covers the exact buffer it was computed from
  return { ...s, content, source, banner: null };
}

function describe(check: api.CheckResponse): string {
  if (!check.wellFormed) return "not well-formed";
  const parts = [
    "well-formed",
    check.trusty === "none" ? "not trusty" : `trusty ${check.trusty}`,
  ];
  if (check.signed !== "none") parts.push(`signature ${check.signed}`);
  return parts.join(", ");
}

function failure(s: EditorState, e: unknown): EditorState {
  const text = e instanceof Error ? e.message : String(e);
  return { ...s, busy: false, banner: { kind: "error", text } };
}

export class Controller {
  constructor(
    public state: EditorState = initialState(),
    private onChange: (s: EditorState) => void = () => {},
  ) {}

  private update(next: EditorState): EditorState {
    this.state = next;
    this.onChange(next);
    return next;
  }

  edit(content: string, source: LoadSource = "paste"): void {
    this.update(setContent(this.state, content, source));
  }

  setFormat(format: api.Format): void {
    this.update({ ...this.state, format });
  }

  async runCheck(): Promise<void> {
    if (!canCheck(this.state)) return;
    const checked = this.state.content;
    this.update({ ...this.state, busy: true, banner: null });
    try {
      const result = await api.check(checked, this.state.format);
      this.update({
        ...this.state,
        busy: false,
        lastCheck: result,
        checkedContent: checked,
        banner: {
          kind: result.wellFormed ? "success" : "error",
          text: describe(result),
        },
      });
    } catch (e) {
      this.update(failure(this.state, e));
    }
  }

  async runTransform(to: api.Format): Promise<void> {
    if (!canTransform(this.state)) return;
    this.update({ ...this.state, busy: true, banner: null });
    try {
      const text = await api.transform(this.state.content, this.state.format, to);
      // new buffer content: any previous check no longer applies
      this.update({
        ...this.state,
        busy: false,
        content: text,
        format: to,
        banner: { kind: "info", text: `transformed to ${to}` },
      });
    } catch (e) {
      this.update(failure(this.state, e));
    }
  }

  async runPublish(): Promise<void> {
    if (!canPublish(this.state)) return;
    this.update({ ...this.state, busy: true, banner: null });
    try {
      const report = await api.publish(this.state.content);
      const noun = report.publishedCount === 1 ? "nanopub" : "nanopubs";
      this.update({
        ...this.state,
        busy: false,
        banner: {
          kind: "success",
          text: `${report.publishedCount} ${noun} published at ${report.server}`,
        },
      });
    } catch (e) {
      // publish failure keeps the buffer intact
      this.update(failure(this.state, e));
    }
  }

  async loadFromRef(ref: string): Promise<void> {
    if (this.state.busy || !ref.trim()) return;
    this.update({ ...this.state, busy: true, banner: null });
    try {
      const text = await api.fetchNanopub(ref.trim());
      this.update({
        ...this.state,
        busy: false,
        content: text,
        format: "trig",
        source: "network",
        banner: { kind: "info", text: `loaded ${ref.trim()}` },
      });
    } catch (e) {
      this.update(failure(this.state, e));
    }
  }
}
