import { ApiClient, ApiError } from "./api.js";
import type { Agreement, LabelValue, Task } from "./types.js";

export type AnnotationPhase =
  | "idle" // nothing loaded yet
  | "task" // a task is on screen
  | "complete" // queue exhausted; agreement report shown
  | "no_plan" // the server has no study loaded
  | "error";

/**
 * State machine behind the annotation view. One task is on screen at a
 * time; its text starts shaded and stays shaded until the annotator clicks
 * through, and the shade resets on every new task. Submitting a label only
 * advances after the server stores it (201). When the queue is exhausted
 * the agreement report becomes the completion screen, fetched rather than
 * computed: the console does no math of its own.
 */
export class AnnotationModel {
  phase: AnnotationPhase = "idle";
  task: Task | null = null;
  revealed = false;
  agreementReport: Agreement | null = null;
  lastError: string | null = null;

  constructor(
    private readonly client: ApiClient,
    readonly annotatorId: string,
  ) {}

  get progress(): { labeled: number; assigned: number } | null {
    if (this.task === null) return null;
    return { labeled: this.task.labeled, assigned: this.task.assigned };
  }

  reveal(): void {
    this.revealed = true;
  }

  async loadNext(): Promise<void> {
    try {
      const task = await this.client.nextTask(this.annotatorId);
      if (task === null) {
        this.task = null;
        this.revealed = false;
        this.agreementReport = await this.client.agreement();
        this.phase = "complete";
      } else {
        this.task = task;
        this.revealed = false;
        this.phase = "task";
      }
      this.lastError = null;
    } catch (err) {
      if (err instanceof ApiError && err.code === "NO_ACTIVE_PLAN") {
        this.task = null;
        this.phase = "no_plan";
        this.lastError = null;
        return;
      }
      this.phase = "error";
      this.lastError = err instanceof Error ? err.message : String(err);
    }
  }

  async submitLabel(value: LabelValue): Promise<void> {
    if (this.task === null) throw new Error("no task on screen");
    try {
      await this.client.submitLabel(this.annotatorId, this.task.tweet_id, value);
    } catch (err) {
      if (!(err instanceof ApiError && err.code === "DUPLICATE_LABEL")) {
        this.lastError = err instanceof Error ? err.message : String(err);
        return;
      }
      // already labeled (e.g. a second tab); treat as done and move on
    }
    await this.loadNext();
  }
}
