import type { ElementId, VocabularyDoc } from "./types.js";

/** Parsed vocabulary with fast membership checks. */
export class Vocabulary {
  readonly elements: ReadonlySet<ElementId>;
  readonly beginMarker: ElementId;
  readonly endMarker: ElementId;
  readonly roles: readonly string[];
  readonly shifts: readonly string[];

  constructor(doc: VocabularyDoc) {
    if (!doc.elements.includes(doc.begin_marker)) {
      throw new Error(`begin marker ${doc.begin_marker} not in elements`);
    }
    if (!doc.elements.includes(doc.end_marker)) {
      throw new Error(`end marker ${doc.end_marker} not in elements`);
    }
    this.elements = new Set(doc.elements);
    this.beginMarker = doc.begin_marker;
    this.endMarker = doc.end_marker;
    this.roles = [...doc.roles];
    this.shifts = [...doc.shifts];
  }

  has(element: ElementId): boolean {
    return this.elements.has(element);
  }
}

export async function loadVocabulary(url: string): Promise<Vocabulary> {
  const response = await fetch(url);
  if (!response.ok) {
    throw new Error(`vocabulary fetch failed: ${response.status}`);
  }
  return new Vocabulary((await response.json()) as VocabularyDoc);
}
