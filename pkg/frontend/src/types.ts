/** Wire types of the prediction service JSON API. */

export type Scalar = string | number | boolean;

export interface PredictionBody {
  class: "satisfied" | "violated";
  probability: number;
  support: number;
  trivial: boolean;
}

export interface PredictionResponse {
  schema_version: number;
  case_id: string;
  goal: string;
  verdict: string;
  prediction: PredictionBody | null;
  no_prediction: boolean;
}

export interface RecommendationCondition {
  attribute: string;
  relation: string;
  value: Scalar | null;
}

export interface RecommendationEntry {
  conditions: RecommendationCondition[];
  class: "satisfied" | "violated";
  probability: number;
  support: number;
}

export interface RecommendationResponse {
  schema_version: number;
  case_id: string;
  goal: string;
  verdict: string;
  trivial: boolean;
  entries: RecommendationEntry[];
}

export interface EventView {
  activity: string;
  timestamp: string;
  attributes: Record<string, Scalar>;
}

export interface CaseResponse {
  schema_version: number;
  case_id: string;
  closed: boolean;
  case_attributes: Record<string, Scalar>;
  events: EventView[];
}

export interface IngestAccepted {
  schema_version: number;
  accepted: true;
  case_id: string;
  events: number;
}

export interface IngestRejected {
  schema_version: number;
  accepted: false;
  reason: string;
}

export type IngestResponse = IngestAccepted | IngestRejected;

export interface SchemaResponse {
  schema_version: number;
  attributes: Record<string, "nominal" | "numeric" | "boolean">;
  activities: string[];
}

export interface GoalsResponse {
  schema_version: number;
  goals: Record<string, string>;
}

export interface EventPayload {
  activity: string;
  timestamp: string;
  attributes?: Record<string, Scalar>;
  case_attributes?: Record<string, Scalar>;
}
