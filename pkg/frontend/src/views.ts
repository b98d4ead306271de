/** Pure HTML renderers.
 *
 * Annotate-mode renderers take no assignment data at all, so automatic
 * labels and scores cannot appear in the annotate DOM: the blind-first
 * workflow is enforced by these signatures, not by styling.
 */

import {
  candidateRanking,
  progress,
  sliceWords,
  validateChoices,
} from "./state.js";
import type {
  AnnotationRecord,
  AssignmentEntry,
  Mode,
  ReportResponse,
  ReportRow,
  SliceChoice,
  TopicView,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function options(
  names: string[],
  selected: string,
  allowEmpty: boolean,
): string {
  const empty = allowEmpty
    ? `<option value=""${selected === "" ? " selected" : ""}>(none)</option>`
    : `<option value="" disabled${selected === "" ? " selected" : ""}>choose…</option>`;
  const rest = names
    .map((name) => {
      const sel = name === selected ? " selected" : "";
      return `<option value="${escapeHtml(name)}"${sel}>${escapeHtml(name)}</option>`;
    })
    .join("");
  return empty + rest;
}

function wordChips(words: string[]): string {
  return words
    .map((w) => `<span class="chip">${escapeHtml(w)}</span>`)
    .join(" ");
}

export function renderSliceSelector(
  sliceCount: number,
  choice: SliceChoice,
): string {
  const slices = Array.from({ length: sliceCount }, (_, t) => {
    const sel = choice === t ? " selected" : "";
    return `<option value="${t}"${sel}>slice ${t}</option>`;
  }).join("");
  const unionSel = choice === "union" ? " selected" : "";
  return `<label class="slice-picker">time slice
    <select data-role="slice">${slices}
      <option value="union"${unionSel}>all slices (union)</option>
    </select></label>`;
}

export interface AnnotateDraft {
  first: string;
  second: string;
}

/** One topic card in blind annotate mode. */
export function renderAnnotateCard(
  topic: TopicView,
  labelNames: string[],
  slice: SliceChoice,
  mine: AnnotationRecord | undefined,
  draft: AnnotateDraft,
  submitError: string | null,
): string {
  const validation = validateChoices(draft.first, draft.second);
  const submitted = mine
    ? `<p class="saved">saved: ${escapeHtml(mine.first)}${
        mine.second ? ` / ${escapeHtml(mine.second)}` : ""
      }</p>`
    : "";
  const error = submitError
    ? `<p class="error" role="alert">${escapeHtml(submitError)}</p>`
    : validation && (draft.first || draft.second)
      ? `<p class="error" role="alert">${escapeHtml(validation)}</p>`
      : "";
  return `<article class="topic-card" data-topic="${topic.id}">
  <header><h3>Topic ${topic.id}</h3></header>
  <div class="words">${wordChips(sliceWords(topic, slice))}</div>
  <form data-role="annotate-form" data-topic="${topic.id}">
    <label>most appropriate
      <select name="first" data-role="first">${options(labelNames, draft.first, false)}</select>
    </label>
    <label>second most appropriate
      <select name="second" data-role="second">${options(labelNames, draft.second, true)}</select>
    </label>
    <button type="submit"${validation ? " disabled" : ""}>
      ${mine ? "resubmit" : "submit"}</button>
    ${error}${submitted}
  </form>
</article>`;
}

export function renderAnnotatePage(
  topics: TopicView[],
  sliceCount: number,
  labelNames: string[],
  slice: SliceChoice,
  mine: Map<number, AnnotationRecord>,
  drafts: Map<number, AnnotateDraft>,
  errors: Map<number, string>,
): string {
  const bar = progress(mine, topics.length);
  const cards = topics
    .map((topic) =>
      renderAnnotateCard(
        topic,
        labelNames,
        slice,
        mine.get(topic.id),
        drafts.get(topic.id) ?? { first: "", second: "" },
        errors.get(topic.id) ?? null,
      ),
    )
    .join("\n");
  return `<section class="annotate">
  <p class="progress" data-role="progress">progress ${bar.done}/${bar.total}</p>
  ${renderSliceSelector(sliceCount, slice)}
  ${cards}
</section>`;
}

/** One topic card in review mode: auto label, score, candidates. */
export function renderReviewCard(
  assignment: AssignmentEntry,
  topic: TopicView | undefined,
  reportRow: ReportRow | undefined,
  labelNames: string[],
  slice: SliceChoice,
  conflict: string | null,
): string {
  const auto =
    assignment.label === null
      ? `<span class="unlabeled">UNLABELED</span>`
      : `<strong>${escapeHtml(assignment.label)}</strong>` +
        (assignment.score !== null
          ? ` <span class="score">(${assignment.measure} ${assignment.score.toFixed(3)})</span>`
          : "");
  const badge =
    assignment.provenance === "human_override"
      ? `<span class="badge override-badge">human_override</span>`
      : "";
  const evicted = assignment.evicted
    ? `<span class="badge evicted-badge">evicted</span>`
    : "";
  const experts = reportRow?.expert_labels?.length
    ? `<p class="experts">expert choice: ${reportRow.expert_labels
        .map(escapeHtml)
        .join(" / ")}${
        reportRow.prop_first !== null
          ? ` (first ${reportRow.prop_first.toFixed(2)}, second ${(
              reportRow.prop_second ?? 0
            ).toFixed(2)})`
          : ""
      }</p>`
    : `<p class="experts">no expert annotations yet</p>`;
  const candidates = candidateRanking(assignment.similarity)
    .slice(0, 5)
    .map(
      ([label, score]) =>
        `<li>${escapeHtml(label)} <span class="score">${score.toFixed(3)}</span></li>`,
    )
    .join("");
  const conflictBox = conflict
    ? `<p class="error" role="alert">${escapeHtml(conflict)}</p>`
    : "";
  return `<article class="topic-card review" data-topic="${assignment.topic}">
  <header><h3>Topic ${assignment.topic} ${badge} ${evicted}</h3></header>
  <p class="auto">auto label: ${auto}</p>
  ${experts}
  <div class="words">${topic ? wordChips(sliceWords(topic, slice)) : ""}</div>
  <ol class="candidates">${candidates}</ol>
  <form data-role="override-form" data-topic="${assignment.topic}">
    <label>override label
      <select name="label" data-role="override-label">
        ${options(labelNames, "", true)}
      </select>
    </label>
    <label>or custom label
      <input type="text" name="custom" data-role="override-custom" />
    </label>
    <label class="unlabel">
      <input type="checkbox" name="unlabel" data-role="override-unlabel" />
      mark UNLABELED
    </label>
    <button type="submit">apply override</button>
    <button type="button" data-role="confirm">confirm auto label</button>
    ${conflictBox}
  </form>
</article>`;
}

export function renderReviewPage(
  assignments: AssignmentEntry[],
  topics: Map<number, TopicView>,
  reportRows: Map<number, ReportRow>,
  labelNames: string[],
  sliceCount: number,
  slice: SliceChoice,
  unusedLabels: string[],
  conflicts: Map<number, string>,
): string {
  const cards = assignments
    .map((assignment) =>
      renderReviewCard(
        assignment,
        topics.get(assignment.topic),
        reportRows.get(assignment.topic),
        labelNames,
        slice,
        conflicts.get(assignment.topic) ?? null,
      ),
    )
    .join("\n");
  const unused = unusedLabels.length
    ? `<p class="unused">unused codebook labels: ${unusedLabels
        .map(escapeHtml)
        .join(", ")}</p>`
    : "";
  return `<section class="review">
  ${renderSliceSelector(sliceCount, slice)}
  ${unused}
  ${cards}
</section>`;
}

export function renderReportPage(report: ReportResponse): string {
  const rows = report.rows
    .map((row) => {
      const fmt = (x: number | null) => (x === null ? "–" : x.toFixed(2));
      return `<tr>
  <td>${row.topic}</td>
  <td>${row.auto_label === null ? "UNLABELED" : escapeHtml(row.auto_label)}</td>
  <td>${row.auto_score === null ? "–" : row.auto_score.toFixed(3)}</td>
  <td>${escapeHtml(row.provenance)}</td>
  <td>${row.expert_labels ? row.expert_labels.map(escapeHtml).join(" / ") : "–"}</td>
  <td>${fmt(row.prop_first)}</td>
  <td>${fmt(row.prop_second)}</td>
  <td>${fmt(row.fleiss_kappa)}</td>
  <td class="words-cell">${row.top_words.map(escapeHtml).join(" ")}</td>
</tr>`;
    })
    .join("\n");
  const kappa = report.summary.mean_kappa;
  return `<section class="report">
  <p class="summary">${report.summary.topics} topics,
    ${report.summary.labeled} labeled, ${report.summary.unlabeled} unlabeled,
    ${report.summary.annotated} annotated,
    mean kappa ${kappa === null ? "–" : kappa.toFixed(3)}</p>
  <table>
    <thead><tr><th>#</th><th>auto label</th><th>score</th><th>provenance</th>
      <th>experts</th><th>prop 1st</th><th>prop 2nd</th><th>kappa</th>
      <th>top words</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>
  <footer class="method-notes">${escapeHtml(report.method_notes)}</footer>
</section>`;
}

/** Blind ordering is per user: review and report stay locked until this
 * annotator finishes their pass, unless they carry the reviewer role. */
export function renderShell(
  mode: Mode,
  annotator: string,
  unlocked: boolean,
  banner: string | null,
  content: string,
): string {
  const tab = (m: Mode, label: string, enabled = true): string =>
    `<a href="#${m}" class="tab${mode === m ? " active" : ""}${
      enabled ? "" : " locked"
    }" data-role="tab-${m}">${label}</a>`;
  const bannerBox = banner
    ? `<div class="banner" role="alert">${escapeHtml(banner)}
       <button data-role="retry">retry</button></div>`
    : "";
  return `<div class="shell">
  <nav>
    ${tab("annotate", "Annotate")}
    ${tab("review", "Review", unlocked)}
    ${tab("report", "Report", unlocked)}
    <span class="annotator">annotator:
      <input data-role="annotator" value="${escapeHtml(annotator)}" /></span>
  </nav>
  ${bannerBox}
  <main>${content}</main>
</div>`;
}

export function renderLockedNotice(done: number, total: number): string {
  return `<section class="locked-notice">
  <p>Blind annotation comes first: finish your own pass
    (${done}/${total} topics) before the review and report views open.
    Designated reviewers can open the app with <code>?role=reviewer</code>.</p>
  <p><a href="#annotate">back to annotation</a></p>
</section>`;
}
