import type {
  AnnotationRecord,
  SliceChoice,
  TopicView,
} from "./types.js";

/** Latest record per topic wins; mirrors the server's replace semantics. */
export function effectiveByTopic(
  records: AnnotationRecord[],
): Map<number, AnnotationRecord> {
  const out = new Map<number, AnnotationRecord>();
  for (const record of records) {
    out.set(record.topic_id, record);
  }
  return out;
}

export function progress(
  mine: Map<number, AnnotationRecord>,
  topicCount: number,
): { done: number; total: number; complete: boolean } {
  let done = 0;
  for (const topicId of mine.keys()) {
    if (topicId >= 0 && topicId < topicCount) {
      done += 1;
    }
  }
  return { done, total: topicCount, complete: done >= topicCount };
}

/** null means the pair is submittable. */
export function validateChoices(
  first: string,
  second: string,
): string | null {
  if (!first) {
    return "pick a first-choice label";
  }
  if (second && second === first) {
    return "first and second choices must differ";
  }
  return null;
}

/** Words shown for a topic at a slice, or the all-slices union view. */
export function sliceWords(topic: TopicView, choice: SliceChoice): string[] {
  if (choice === "union") {
    const seen = new Set<string>();
    const out: string[] = [];
    for (const words of topic.top_words_by_slice) {
      for (const word of words) {
        if (!seen.has(word)) {
          seen.add(word);
          out.push(word);
        }
      }
    }
    return out;
  }
  return topic.top_words_by_slice[choice] ?? [];
}

/** Candidate labels ranked by similarity, ties broken alphabetically. */
export function candidateRanking(
  similarity: Record<string, number>,
): [string, number][] {
  return Object.entries(similarity).sort(
    (a, b) => b[1] - a[1] || a[0].localeCompare(b[0]),
  );
}

export function defaultSlice(sliceCount: number): SliceChoice {
  return sliceCount - 1;
}
