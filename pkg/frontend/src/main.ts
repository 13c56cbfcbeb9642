// Entry point: login, tab navigation, and the poll loops. All decisions
// live in the models; this file only wires DOM events to them.

import { AnnotationModel } from "./annotation.js";
import { ApiClient } from "./api.js";
import { DashboardModel } from "./dashboard.js";
import { ModerationModel } from "./moderation.js";
import { Poller } from "./poller.js";
import { renderAnnotation, renderDashboard, renderModeration } from "./render.js";
import { ConsoleSession } from "./session.js";
import type { Settings } from "./types.js";

type View = "dashboard" | "moderation" | "annotation";

async function loadSettings(): Promise<Settings> {
  const response = await fetch("./settings.json");
  if (!response.ok) throw new Error("settings.json missing");
  return (await response.json()) as Settings;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

function startConsole(session: ConsoleSession, election: string): void {
  const client = new ApiClient(session.apiBaseUrl, session.token);
  const dashboard = new DashboardModel(client, election);
  const moderation = new ModerationModel(client);
  const annotation =
    session.annotatorId !== null ? new AnnotationModel(client, session.annotatorId) : null;

  el("login").hidden = true;
  el("console").hidden = false;
  const content = el<HTMLElement>("content");

  let view: View = "dashboard";
  let poller: Poller | null = null;

  const redraw = () => {
    if (view === "dashboard") renderDashboard(content, dashboard);
    else if (view === "moderation") renderModeration(content, moderation);
    else if (annotation !== null) renderAnnotation(content, annotation);
    else content.innerHTML = "<p class=\"muted\">log in with an annotator id to label</p>";
  };

  const show = (next: View) => {
    view = next;
    poller?.stop();
    poller = null;
    for (const button of document.querySelectorAll<HTMLButtonElement>("nav button")) {
      button.classList.toggle("active", button.dataset["view"] === next);
    }
    if (next === "dashboard") {
      poller = new Poller(async () => {
        await dashboard.refresh();
        redraw();
      }, session.pollIntervalSeconds);
      poller.start();
    } else if (next === "moderation") {
      poller = new Poller(async () => {
        await moderation.refresh();
        redraw();
      }, session.pollIntervalSeconds);
      poller.start();
    } else {
      // annotation pulls tasks on demand, no polling
      if (annotation !== null && annotation.phase === "idle") {
        void annotation.loadNext().then(redraw);
      }
      redraw();
    }
  };

  for (const button of document.querySelectorAll<HTMLButtonElement>("nav button")) {
    button.addEventListener("click", () => show(button.dataset["view"] as View));
  }

  content.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.classList.contains("shade")) {
      if (view === "annotation" && annotation !== null) {
        annotation.reveal();
        redraw();
      } else {
        target.classList.remove("shade");
        target.classList.add("revealed");
      }
      return;
    }
    const action = target.dataset["action"];
    if (!action) return;
    if (view === "moderation") {
      const id = Number(target.dataset["id"]);
      if (action === "dismiss") {
        moderation.dismissConflict(id);
        redraw();
        return;
      }
      const editBox = content.querySelector<HTMLTextAreaElement>(
        `textarea.edit-box[data-id="${id}"]`,
      );
      const run =
        action === "approve"
          ? moderation.approve(id, editBox?.value)
          : moderation.reject(id);
      void run.then((result) => {
        if (!result.ok && result.error !== "already reviewed") {
          window.alert(result.error ?? "review failed");
        }
        redraw();
      });
    } else if (view === "annotation" && annotation !== null && action === "label") {
      const value = target.dataset["value"];
      if (value === "TOXIC" || value === "NOT_TOXIC") {
        void annotation.submitLabel(value).then(redraw);
      }
    }
  });

  content.addEventListener("submit", (event) => {
    if ((event.target as HTMLElement).id !== "submit-form") return;
    event.preventDefault();
    const text = content.querySelector<HTMLTextAreaElement>("#submit-text");
    const attribution = content.querySelector<HTMLInputElement>("#submit-attribution");
    const errorSlot = content.querySelector<HTMLElement>("#submit-error");
    if (text === null) return;
    void moderation.submit(text.value, attribution?.value || undefined).then((result) => {
      if (result.ok) {
        redraw();
      } else if (errorSlot !== null) {
        errorSlot.textContent = result.error;
      }
    });
  });

  show("dashboard");
}

async function boot(): Promise<void> {
  const settings = await loadSettings();
  const form = el<HTMLFormElement>("login-form");
  el<HTMLInputElement>("login-url").value = settings.apiBaseUrl;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const url = el<HTMLInputElement>("login-url").value.trim();
    const token = el<HTMLInputElement>("login-token").value.trim();
    const election = el<HTMLInputElement>("login-election").value.trim();
    const annotator = el<HTMLInputElement>("login-annotator").value.trim();
    if (!url || !election) {
      el("login-error").textContent = "API URL and election are required";
      return;
    }
    try {
      const session = new ConsoleSession(
        url,
        token || null,
        annotator || null,
        settings.pollIntervalSeconds,
      );
      startConsole(session, election);
    } catch (err) {
      el("login-error").textContent = err instanceof Error ? err.message : String(err);
    }
  });
}

void boot();
