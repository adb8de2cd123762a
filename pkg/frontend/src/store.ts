/** Framework-free chat state: an append-only transcript, the open-goal
 * badges, and a single-in-flight send loop.  The DOM layer subscribes via
 * onChange and renders snapshots; tests drive this directly against a
 * stubbed service. */

import { DialogClient, OpenGoal, ServiceError } from "./api.js";

export interface TranscriptEntry {
  speaker: "user" | "system";
  /** Speech-act label exactly as delivered; "" for user entries (the
   * service classifies those only after the turn), "error" for inline
   * failure bubbles. */
  act: string;
  text: string;
  timestamp: number;
}

export class ChatController {
  private readonly entries: TranscriptEntry[] = [];
  private readonly listeners: Array<() => void> = [];
  private sessionIdValue: string | null = null;
  private busyFlag = false;

  /** Open-goal badges from the latest turn. */
  goals: OpenGoal[] = [];
  /** Last discourse box delivered by the service, verbatim. */
  drsBox = "";
  /** Text to restore into the input after a failed send. */
  draft = "";

  constructor(
    private readonly client: DialogClient,
    private readonly now: () => number = () => Date.now(),
  ) {}

  get transcript(): readonly TranscriptEntry[] {
    return this.entries;
  }

  get busy(): boolean {
    return this.busyFlag;
  }

  get sessionId(): string | null {
    return this.sessionIdValue;
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  private append(speaker: "user" | "system", act: string, text: string): void {
    this.entries.push({ speaker, act, text, timestamp: this.now() });
    this.emit();
  }

  /** Send one utterance; ignored while a turn is already in flight. */
  async send(text: string): Promise<void> {
    const trimmed = text.trim();
    if (!trimmed || this.busyFlag) return;
    this.busyFlag = true;
    this.draft = "";
    this.append("user", "", trimmed);
    try {
      if (this.sessionIdValue === null) {
        this.sessionIdValue = (await this.client.createSession()).sessionId;
      }
      const resp = await this.client.sendUtterance(this.sessionIdValue, trimmed);
      this.goals = resp.openGoals;
      this.drsBox = resp.drsBox;
      this.append("system", resp.act, resp.text);
    } catch (err) {
      const message =
        err instanceof ServiceError ? `${err.code}: ${err.message}` : String(err);
      this.draft = trimmed; // never lose what the user typed
      this.append("system", "error", message);
    } finally {
      this.busyFlag = false;
      this.emit();
    }
  }
}
