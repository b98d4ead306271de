/** Browser bootstrap: hash routing, event delegation, server sync.
 *
 * The client holds no authoritative state: every view is rebuilt from GET
 * endpoints, and a submission only shows as saved after the server's 200
 * and a refetch. In annotate mode assignments are never even requested.
 */

import { ApiError, Client } from "./api.js";
import { defaultSlice, effectiveByTopic, progress } from "./state.js";
import type {
  AnnotationRecord,
  LabelsResponse,
  Mode,
  SliceChoice,
  TopicsResponse,
} from "./types.js";
import {
  renderAnnotatePage,
  renderLockedNotice,
  renderReportPage,
  renderReviewPage,
  renderShell,
  type AnnotateDraft,
} from "./views.js";

const client = new Client();

interface AppState {
  mode: Mode;
  annotator: string;
  slice: SliceChoice;
  topics: TopicsResponse | null;
  labels: LabelsResponse | null;
  mine: Map<number, AnnotationRecord>;
  drafts: Map<number, AnnotateDraft>;
  errors: Map<number, string>;
  conflicts: Map<number, string>;
  banner: string | null;
}

const state: AppState = {
  mode: "annotate",
  annotator: localStorage.getItem("annotator") ?? "expert",
  slice: 0,
  topics: null,
  labels: null,
  mine: new Map(),
  drafts: new Map(),
  errors: new Map(),
  conflicts: new Map(),
  banner: null,
};

function labelNames(): string[] {
  if (!state.labels) {
    return [];
  }
  return [
    ...state.labels.labels.map((entry) => entry.label),
    ...state.labels.skipped_labels,
    ...state.labels.extra_labels,
  ];
}

function modeFromHash(): Mode {
  const hash = window.location.hash.replace("#", "");
  return hash === "review" || hash === "report" ? hash : "annotate";
}

async function loadBase(): Promise<void> {
  state.topics = await client.getTopics();
  state.labels = await client.getLabels();
  state.slice = defaultSlice(state.topics.slice_count);
}

async function refreshMine(): Promise<void> {
  const response = await client.getAnnotations(state.annotator);
  state.mine = effectiveByTopic(response.annotations);
}

async function render(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) {
    return;
  }
  try {
    if (!state.topics || !state.labels) {
      await loadBase();
    }
    const topics = state.topics!;
    await refreshMine();
    const bar = progress(state.mine, topics.topics.length);
    const isReviewer =
      new URLSearchParams(window.location.search).get("role") === "reviewer";
    const unlocked = bar.complete || isReviewer;
    let content = "";
    if (state.mode !== "annotate" && !unlocked) {
      content = renderLockedNotice(bar.done, bar.total);
    } else if (state.mode === "annotate") {
      content = renderAnnotatePage(
        topics.topics,
        topics.slice_count,
        labelNames(),
        state.slice,
        state.mine,
        state.drafts,
        state.errors,
      );
    } else if (state.mode === "review") {
      const [assignments, report] = await Promise.all([
        client.getAssignments(),
        client.getReport(),
      ]);
      content = renderReviewPage(
        assignments.assignments,
        new Map(topics.topics.map((topic) => [topic.id, topic])),
        new Map(report.rows.map((row) => [row.topic, row])),
        labelNames(),
        topics.slice_count,
        state.slice,
        assignments.unused_labels,
        state.conflicts,
      );
    } else {
      content = renderReportPage(await client.getReport());
    }
    state.banner = null;
    root.innerHTML = renderShell(
      state.mode,
      state.annotator,
      unlocked,
      null,
      content,
    );
  } catch (err) {
    state.banner =
      err instanceof ApiError
        ? `server rejected the request (${err.status})`
        : "network failure: nothing was saved";
    root.innerHTML = renderShell(
      state.mode,
      state.annotator,
      false,
      state.banner,
      "",
    );
  }
}

async function submitAnnotation(form: HTMLFormElement): Promise<void> {
  const topicId = Number(form.dataset.topic);
  const first =
    (form.querySelector("[data-role=first]") as HTMLSelectElement).value;
  const second =
    (form.querySelector("[data-role=second]") as HTMLSelectElement).value;
  state.errors.delete(topicId);
  try {
    await client.postAnnotation({
      annotator: state.annotator,
      topic_id: topicId,
      first,
      second: second || null,
    });
    state.drafts.delete(topicId);
  } catch (err) {
    state.errors.set(
      topicId,
      err instanceof ApiError
        ? `rejected (${err.status}): fix the choices and resubmit`
        : "network failure: not saved, try again",
    );
  }
  await render();
}

async function submitOverride(form: HTMLFormElement): Promise<void> {
  const topicId = Number(form.dataset.topic);
  const select =
    (form.querySelector("[data-role=override-label]") as HTMLSelectElement)
      .value;
  const custom =
    (form.querySelector("[data-role=override-custom]") as HTMLInputElement)
      .value;
  const unlabel =
    (form.querySelector("[data-role=override-unlabel]") as HTMLInputElement)
      .checked;
  const label = unlabel ? null : custom.trim() || select || null;
  state.conflicts.delete(topicId);
  try {
    await client.postOverride({
      topic_id: topicId,
      label,
      annotator: state.annotator,
    });
  } catch (err) {
    state.conflicts.set(
      topicId,
      err instanceof ApiError && err.status === 409
        ? `label conflict: ${JSON.stringify(err.detail)}`
        : "network failure: not saved, try again",
    );
  }
  await render();
}

function wireEvents(): void {
  window.addEventListener("hashchange", () => {
    state.mode = modeFromHash();
    void render();
  });
  document.addEventListener("submit", (event) => {
    const form = event.target as HTMLFormElement;
    if (form.dataset.role === "annotate-form") {
      event.preventDefault();
      void submitAnnotation(form);
    } else if (form.dataset.role === "override-form") {
      event.preventDefault();
      void submitOverride(form);
    }
  });
  document.addEventListener("change", (event) => {
    const el = event.target as HTMLElement;
    if (el.dataset.role === "slice") {
      const value = (el as HTMLSelectElement).value;
      state.slice = value === "union" ? "union" : Number(value);
      void render();
    } else if (el.dataset.role === "annotator") {
      state.annotator = (el as HTMLInputElement).value || "expert";
      localStorage.setItem("annotator", state.annotator);
      void render();
    } else if (
      el.dataset.role === "first" ||
      el.dataset.role === "second"
    ) {
      const form = el.closest("form") as HTMLFormElement;
      const topicId = Number(form.dataset.topic);
      state.drafts.set(topicId, {
        first: (form.querySelector("[data-role=first]") as
          HTMLSelectElement).value,
        second: (form.querySelector("[data-role=second]") as
          HTMLSelectElement).value,
      });
      void render();
    }
  });
  document.addEventListener("click", (event) => {
    const el = event.target as HTMLElement;
    if (el.dataset.role === "retry") {
      void render();
    } else if (el.dataset.role === "confirm") {
      // confirming the auto label posts nothing; it simply records intent
      const card = el.closest("article");
      if (card) {
        el.textContent = "confirmed";
        el.setAttribute("disabled", "disabled");
      }
    }
  });
}

state.mode = modeFromHash();
wireEvents();
void render();
