// Shapes of the JSON bodies the API serves. These mirror the server's
// responses field for field; the console never invents fields of its own.

export interface FeedItem {
  tweet_id: string;
  created_at: string;
  author_handle: string;
  text: string;
  toxicity: number;
  threshold_in_effect: number;
  flagged: boolean;
  action: string;
  candidate_handle: string;
  positivtweet_id: number | null;
}

export interface FeedPage {
  items: FeedItem[];
  next_cursor: string | null;
}

export interface LexiconRow {
  term: string;
  matches: number;
  toxic_matches: number;
  false_negatives: number;
}

export interface CandidateReport {
  handle: string;
  total_tweets: number;
  toxic_tweets: number;
  share_of_total_toxic: number;
  lexicon_rows: LexiconRow[];
}

export interface ElectionSummary {
  election_id: string;
  days_in_operation: number;
  report_threshold: number;
  candidates_tracked: number;
  tweets_analyzed: number;
  tweets_flagged: number;
  positives_sent: number;
}

export interface ReportPayload {
  election: ElectionSummary;
  candidates: CandidateReport[];
}

export type PositivState = "PENDING" | "APPROVED" | "REJECTED";

export interface PositivTweet {
  id: number;
  text: string;
  language_tags: string[];
  origin: string;
  state: PositivState;
  attribution: string | null;
  submitted_at: string | null;
  reviewed_at: string | null;
  edited_text: string | null;
  effective_text: string;
}

export interface PositivTweetList {
  items: PositivTweet[];
}

export interface Task {
  tweet_id: string;
  text: string;
  instructions: string;
  labeled: number;
  assigned: number;
}

export type LabelValue = "TOXIC" | "NOT_TOXIC";

export interface LabelOut {
  tweet_id: string;
  annotator_id: string;
  value: string;
  labeled_at: string;
}

export interface Agreement {
  sample_size: number;
  labeled_items: number;
  toxic_count: number;
  not_toxic_count: number;
  undecided_count: number;
  toxic_pct: number | null;
  not_toxic_pct: number | null;
  kappa: number | null;
  kappa_note: string | null;
}

export interface Settings {
  apiBaseUrl: string;
  pollIntervalSeconds: number;
}
