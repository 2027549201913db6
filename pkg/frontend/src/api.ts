/** Typed client for the review service HTTP API. */

export type PanelKind = "stars" | "flag" | "face";

export interface IndicatorRow {
  name: string;
  label: string;
  kind: PanelKind;
  value: number | boolean | string | null;
}

export interface ArticleListing {
  article_ids: string[];
  assignment_order: string[];
  condition?: string;
  rated?: string[];
}

export interface ArticleView {
  id: string;
  title: string;
  paragraphs: string[];
  condition: string;
  indicators?: IndicatorRow[];
}

export interface RatingOutcome {
  stored: boolean;
  duplicate: boolean;
  condition: string;
}

export interface BucketRow {
  bucket: string;
  n_articles: number;
  rmse_with: number | null;
  rmse_without: number | null;
  rmse_automated: number | null;
}

export interface AgreementReport {
  n_ratings: number;
  buckets: BucketRow[];
}

export const CONDITION_WITH = "with_indicators";
export const CONDITION_WITHOUT = "without_indicators";

/** Query value for the article endpoint under a rater's assigned condition. */
export function conditionQuery(condition: string): "with" | "without" {
  return condition === CONDITION_WITH ? "with" : "without";
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ReviewApi {
  private fetchFn: FetchLike;

  constructor(private base: string = "",
              fetchFn?: FetchLike) {
    // default wraps the global so the host keeps its expected receiver
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.base + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const body = (await res.json()) as { detail?: string };
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  listArticles(raterId?: string): Promise<ArticleListing> {
    const query = raterId
      ? `?rater_id=${encodeURIComponent(raterId)}`
      : "";
    return this.request<ArticleListing>(`/api/articles${query}`);
  }

  getArticle(articleId: string,
             condition: "with" | "without"): Promise<ArticleView> {
    const id = encodeURIComponent(articleId);
    return this.request<ArticleView>(
      `/api/articles/${id}?condition=${condition}`);
  }

  submitRating(articleId: string, raterId: string,
               score: number): Promise<RatingOutcome> {
    return this.request<RatingOutcome>("/api/ratings", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        article_id: articleId,
        rater_id: raterId,
        score: score,
      }),
    });
  }

  getReport(): Promise<AgreementReport> {
    return this.request<AgreementReport>("/api/report");
  }
}
