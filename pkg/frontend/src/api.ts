// Typed client over the gateway JSON API. The server is the ordering and
// scoring authority; this layer only moves data.

export interface FeedCard {
  post_id: string;
  category: string;
  author_id: string;
  comment_count: number;
  like_count: number;
  share_count: number;
  age_hours: number;
  sentiment: number;
  trend: number;
  importance: number;
  filter_status: number;
  readability: number;
  friend_delta: number;
  score: number;
}

export interface FeedPage {
  user_id: string;
  now: number;
  total: number;
  feed: FeedCard[];
}

export interface PersonaResponse {
  user_id: string;
  cold_start: boolean;
  categories: Record<string, unknown>;
  affinities: Record<string, number>;
}

export interface FeedbackResponse {
  user_id: string;
  affinities: Record<string, number>;
}

export interface VideoQueryResponse {
  video_id: string;
  answer: string;
  node_id: string;
  similarity: number;
  prompt: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, init);
  if (!resp.ok) {
    throw new ApiError(resp.status, `${resp.status} ${resp.statusText}`);
  }
  return (await resp.json()) as T;
}

export class GatewayClient {
  constructor(private baseUrl: string = "") {}

  getFeed(userId: string, limit = 20): Promise<FeedPage> {
    return request<FeedPage>(
      `${this.baseUrl}/feed/${encodeURIComponent(userId)}?limit=${limit}`
    );
  }

  getPersona(userId: string): Promise<PersonaResponse> {
    return request<PersonaResponse>(
      `${this.baseUrl}/persona/${encodeURIComponent(userId)}`
    );
  }

  postFeedback(
    userId: string,
    postId: string,
    verdict: "like" | "dislike"
  ): Promise<FeedbackResponse> {
    return request<FeedbackResponse>(`${this.baseUrl}/feedback`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ user_id: userId, post_id: postId, verdict }),
    });
  }

  queryVideo(videoId: string, question: string): Promise<VideoQueryResponse> {
    return request<VideoQueryResponse>(
      `${this.baseUrl}/videos/${encodeURIComponent(videoId)}/query`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ question }),
      }
    );
  }
}
