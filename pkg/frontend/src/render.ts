/** DOM builders for the view models. No state; app.ts owns wiring. */

import type {
  BoardCellView,
  BoardRowView,
  ComparisonRowView,
  RankingRowView,
} from "./views.js";

type Child = Node | string;

export function el(
  doc: Document,
  tag: string,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElement {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function renderRankingTable(doc: Document, rows: RankingRowView[]): HTMLElement {
  const header = el(doc, "tr", {}, [
    el(doc, "th", {}, ["#"]),
    el(doc, "th", {}, ["requirement"]),
    el(doc, "th", {}, ["importance"]),
    el(doc, "th", {}, ["moved"]),
    el(doc, "th", {}, ["ratings"]),
  ]);
  const body = rows.map((row) =>
    el(doc, "tr", { "data-requirement": row.requirementId, class: `status-${row.status}` }, [
      el(doc, "td", { class: "rank" }, [String(row.rank)]),
      el(doc, "td", { class: "req" }, [
        el(doc, "span", { class: "req-id" }, [row.requirementId]),
        " ",
        el(doc, "span", { class: "req-title" }, [row.title]),
      ]),
      el(doc, "td", { class: "importance" }, [row.importanceText]),
      el(doc, "td", { class: `delta delta-${row.deltaDirection}` }, [row.deltaText]),
      el(doc, "td", { class: "badges" }, [row.badgeText]),
    ]),
  );
  return el(doc, "table", { class: "ranking" }, [header, ...body]);
}

export type CellSubmit = (stakeholderId: string, requirementId: string, value: number) => void;

function renderBoardCell(
  doc: Document,
  requirementId: string,
  cell: BoardCellView,
  onSubmit: CellSubmit,
): HTMLElement {
  const node = el(doc, "div", {
    class: `cell cell-${cell.kind}`,
    "data-stakeholder": cell.stakeholderId,
    "data-requirement": requirementId,
  });
  if (cell.kind === "missing" && cell.color) {
    node.style.background = cell.color;
  }
  node.append(el(doc, "span", { class: "cell-stakeholder" }, [cell.stakeholderId]));
  if (cell.value !== null) {
    node.append(el(doc, "span", { class: "cell-value" }, [String(cell.value)]));
  }
  if (cell.score !== null) {
    node.append(
      el(doc, "span", { class: "cell-score", title: "likelihood" }, [cell.score.toFixed(3)]),
    );
  }
  const input = el(doc, "input", {
    class: "cell-input",
    type: "number",
    step: "any",
    placeholder: "rate",
  }) as HTMLInputElement;
  const error = el(doc, "span", { class: "cell-error" });
  input.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key !== "Enter") {
      return;
    }
    const value = Number(input.value);
    if (input.value === "" || Number.isNaN(value)) {
      error.textContent = "enter a number";
      return;
    }
    error.textContent = "";
    onSubmit(cell.stakeholderId, requirementId, value);
  });
  node.append(input, error);
  return node;
}

export function renderBoardRow(
  doc: Document,
  row: BoardRowView,
  onSubmit: CellSubmit,
): HTMLElement {
  const head = el(doc, "div", { class: "board-row-head" }, [
    el(doc, "span", { class: "req-id" }, [row.requirementId]),
  ]);
  if (row.stale) {
    head.append(el(doc, "span", { class: "stale" }, ["likelihoods stale"]));
  }
  const cells = row.cells.map((cell) => renderBoardCell(doc, row.requirementId, cell, onSubmit));
  return el(doc, "div", { class: "board-row", "data-requirement": row.requirementId }, [
    head,
    el(doc, "div", { class: "board-cells" }, cells),
  ]);
}

export function renderComparison(
  doc: Document,
  rows: ComparisonRowView[],
  interactions: number,
  predictedCount: number,
): HTMLElement {
  const caption = el(doc, "div", { class: "comparison-summary" }, [
    `${predictedCount} ratings predicted, ${interactions} stakeholder interactions`,
  ]);
  const header = el(doc, "tr", {}, [
    el(doc, "th", {}, ["requirement"]),
    el(doc, "th", {}, ["was"]),
    el(doc, "th", {}, ["now"]),
    el(doc, "th", {}, ["moved"]),
    el(doc, "th", {}, ["importance"]),
  ]);
  const body = rows.map((row) =>
    el(doc, "tr", { "data-requirement": row.requirementId }, [
      el(doc, "td", {}, [row.requirementId]),
      el(doc, "td", { class: "old-rank" }, [row.oldRank === null ? "entered" : String(row.oldRank)]),
      el(doc, "td", { class: "new-rank" }, [String(row.newRank)]),
      el(doc, "td", { class: "delta" }, [
        row.delta === null ? "entered" : row.delta > 0 ? `up ${row.delta}` : row.delta < 0 ? `down ${-row.delta}` : "=",
      ]),
      el(doc, "td", { class: "importance" }, [row.importanceText]),
    ]),
  );
  return el(doc, "div", { class: "comparison" }, [
    caption,
    el(doc, "table", { class: "comparison-table" }, [header, ...body]),
  ]);
}
