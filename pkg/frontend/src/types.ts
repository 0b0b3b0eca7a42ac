/** Payload shapes of the reqrank HTTP API, mirrored field for field. */

export interface Scale {
  min: number;
  max: number;
}

export interface RankingItem {
  requirement_id: string;
  title: string;
  status: string;
  importance: number;
  rank: number;
  /** Previous rank minus current rank; null when unranked before. */
  rank_delta: number | null;
  elicited_count: number;
  predicted_count: number;
}

export interface RankingResponse {
  project_id: string;
  revision: number;
  ranking: RankingItem[];
}

export interface AddRequirementsResponse extends RankingResponse {
  added: string[];
}

export interface PutRatingsResponse extends RankingResponse {
  updated: number;
}

export interface LikelihoodScore {
  stakeholder_id: string;
  score: number;
}

export interface LikelihoodsResponse {
  project_id: string;
  revision: number;
  requirement_id: string;
  /** Server order: descending score, ties by stakeholder id. */
  scores: LikelihoodScore[];
  elicited_stakeholder_ids: string[];
  predicted_stakeholder_ids: string[];
}

export interface TrainingSummary {
  converged: boolean;
  iterations: number;
  final_cost: number;
}

export interface PlanCell {
  stakeholder_id: string;
  requirement_id: string;
}

export interface IncorporateResponse extends RankingResponse {
  predicted_count: number;
  interactions: number;
  plan: PlanCell[];
  training: TrainingSummary | null;
}

export interface ReportRole {
  id: string;
  name: string;
  rank: number;
}

export interface ReportStakeholder {
  id: string;
  name: string;
  role_id: string;
  within_role_rank: number;
}

export interface ReportRequirement {
  id: string;
  title: string;
  status: string;
}

export interface ReportRating {
  stakeholder_id: string;
  requirement_id: string;
  rating: number;
  provenance: string;
}

export interface RevisionEntry {
  revision: number;
  action: string;
  ranking: { requirement_id: string; rank: number; importance: number }[];
}

export interface ReportResponse {
  project_id: string;
  name: string;
  revision: number;
  scale: Scale;
  roles: ReportRole[];
  stakeholders: ReportStakeholder[];
  requirements: ReportRequirement[];
  ratings: ReportRating[];
  ranking: RankingItem[];
  revisions: RevisionEntry[];
}

// Request bodies.

export interface RoleInput {
  id: string;
  name?: string;
  rank: number;
}

export interface StakeholderInput {
  id: string;
  name?: string;
  role_id: string;
  within_role_rank: number;
}

export interface RequirementInput {
  id: string;
  title?: string;
  description?: string | null;
}

export interface RatingInput {
  stakeholder_id: string;
  requirement_id: string;
  rating: number;
}

export interface CreateProjectRequest {
  id?: string;
  name?: string;
  scale?: Scale;
  roles: RoleInput[];
  stakeholders: StakeholderInput[];
  requirements?: RequirementInput[];
  ratings?: RatingInput[];
}

export interface IncorporateOptions {
  expected_revision?: number;
  fraction?: number;
  similarity_method?: string;
  seed?: number;
  n_features?: number;
  learning_rate?: number;
  regularization?: number;
  max_iterations?: number;
  convergence_tol?: number;
  init_half_width?: number;
}
