/** Page controller for a review round: one rater walks the assigned
 * article order, reads each article (with or without the indicator
 * panel, per the rater's server-assigned condition), and submits a
 * 1..5 rating per article. */

import type { ArticleView, ReviewApi } from "./api.js";
import { conditionQuery } from "./api.js";
import { renderPanel } from "./panel.js";

export class ReviewApp {
  private raterId = "";
  private condition = "";
  private order: string[] = [];
  private rated = new Set<string>();
  private index = 0;
  private submitting = false;

  constructor(private root: HTMLElement, private api: ReviewApi) {}

  /** Initial screen: ask for the rater id, then begin the round. */
  renderStart(): void {
    this.root.replaceChildren();
    const form = document.createElement("form");
    form.className = "start-form";
    const label = document.createElement("label");
    label.htmlFor = "rater-id";
    label.textContent = "Rater id";
    const input = document.createElement("input");
    input.id = "rater-id";
    input.name = "rater-id";
    input.required = true;
    const button = document.createElement("button");
    button.type = "submit";
    button.textContent = "Start reviewing";
    form.append(label, input, button);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const value = input.value.trim();
      if (value) {
        void this.start(value);
      }
    });
    this.root.append(form);
  }

  async start(raterId: string): Promise<void> {
    this.raterId = raterId;
    const listing = await this.api.listArticles(raterId);
    this.condition = listing.condition ?? "";
    this.order = listing.assignment_order;
    this.rated = new Set(listing.rated ?? []);
    // resume at the first article this rater has not rated yet
    const next = this.order.findIndex((id) => !this.rated.has(id));
    this.index = next === -1 ? 0 : next;
    await this.showCurrent();
  }

  async showCurrent(): Promise<void> {
    const articleId = this.order[this.index];
    const view = await this.api.getArticle(
      articleId, conditionQuery(this.condition));
    this.renderArticle(view);
  }

  private renderArticle(view: ArticleView): void {
    this.root.replaceChildren();

    const header = document.createElement("header");
    const progress = document.createElement("span");
    progress.className = "progress";
    progress.textContent =
      `Article ${this.index + 1} of ${this.order.length}`;
    const rater = document.createElement("span");
    rater.className = "rater";
    rater.textContent = `Rater: ${this.raterId}`;
    header.append(progress, rater);
    this.root.append(header);

    const article = document.createElement("article");
    const title = document.createElement("h1");
    title.textContent = view.title;
    article.append(title);
    for (const paragraph of view.paragraphs) {
      const p = document.createElement("p");
      p.textContent = paragraph;
      article.append(p);
    }
    this.root.append(article);

    if (view.indicators) {
      this.root.append(renderPanel(view.indicators));
    }

    this.root.append(this.renderRatingControls(view.id));
    this.root.append(this.renderNav());
  }

  private renderRatingControls(articleId: string): HTMLElement {
    const section = document.createElement("section");
    section.className = "rating";
    const prompt = document.createElement("p");
    prompt.textContent = "How would you rate the quality of this article?";
    section.append(prompt);

    const alreadyRated = this.rated.has(articleId);
    for (let score = 1; score <= 5; score++) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "score-button";
      button.dataset.score = String(score);
      button.textContent = String(score);
      button.disabled = alreadyRated;
      button.addEventListener("click", () => {
        void this.submit(articleId, score);
      });
      section.append(button);
    }

    const status = document.createElement("p");
    status.className = "status";
    status.textContent = alreadyRated ? "Already rated." : "";
    section.append(status);
    return section;
  }

  private renderNav(): HTMLElement {
    const nav = document.createElement("nav");
    const prev = document.createElement("button");
    prev.type = "button";
    prev.className = "nav-prev";
    prev.textContent = "Previous";
    prev.disabled = this.index === 0;
    prev.addEventListener("click", () => {
      this.index -= 1;
      void this.showCurrent();
    });
    const next = document.createElement("button");
    next.type = "button";
    next.className = "nav-next";
    next.textContent = "Next";
    next.disabled = this.index === this.order.length - 1;
    next.addEventListener("click", () => {
      this.index += 1;
      void this.showCurrent();
    });
    nav.append(prev, next);
    return nav;
  }

  /** Submit once: repeat clicks while a request is in flight are dropped,
   * and a rated article's buttons stay disabled. The service also
   * deduplicates by (rater, article), so a stray double-post stores one
   * rating either way. */
  async submit(articleId: string, score: number): Promise<void> {
    if (this.submitting || this.rated.has(articleId)) {
      return;
    }
    this.submitting = true;
    try {
      const outcome = await this.api.submitRating(
        articleId, this.raterId, score);
      this.rated.add(articleId);
      this.setStatus(outcome.duplicate
        ? "Already rated."
        : `Saved rating ${score}.`);
      this.disableScoreButtons();
    } catch (error) {
      this.setStatus(`Could not save the rating: ${String(error)}`);
    } finally {
      this.submitting = false;
    }
  }

  private setStatus(text: string): void {
    const status = this.root.querySelector<HTMLElement>(".status");
    if (status) {
      status.textContent = text;
    }
  }

  private disableScoreButtons(): void {
    for (const button of
         this.root.querySelectorAll<HTMLButtonElement>(".score-button")) {
      button.disabled = true;
    }
  }
}
