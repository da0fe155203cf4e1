// Wire types mirroring the service's JSON schemas. The client never invents
// values of these shapes beyond what the user typed or drew.

export type StepStatus = "draft" | "contextualized";
export type RenderScale = "full_body" | "hands_only";

export interface StepDto {
  id: string;
  text: string;
  status: StepStatus;
  scale: RenderScale;
}

export interface TrajectorySampleDto {
  t_s: number;
  x_m: number;
  y_m: number;
}

export interface TrajectoryDto {
  frame_of_reference: string;
  samples: TrajectorySampleDto[];
}

export interface KeypointDto {
  x_m: number;
  y_m: number;
  object_id: string;
  pose_6dof?: { position: number[]; quaternion: number[] } | null;
}

export interface GroupDto {
  id: string;
  step_ids: string[];
  trajectory: TrajectoryDto | null;
  snapshot: KeypointDto[];
}

export interface ProjectDto {
  id: string;
  task_text: string;
  steps: StepDto[];
  groups: GroupDto[];
}

export interface SkeletonDto {
  joint_names: string[];
  root_index: number;
  height_m: number;
}

export interface PlanStepDto {
  text: string;
  frame_range: [number, number];
  scale: RenderScale;
  trajectory: TrajectoryDto;
  target: KeypointDto | null;
}

export interface PlanDto {
  fps: number;
  skeleton: SkeletonDto;
  warnings: string[];
  steps: PlanStepDto[];
}

export interface VariantMetricsDto {
  transition_m: number | null;
  spatial_m: number | null;
}

export interface ReportDto {
  naive: VariantMetricsDto;
  smoothed: VariantMetricsDto;
  // the service encodes an unbounded ratio as the string "inf"
  ratio: number | "inf" | null;
  plausible: boolean | null;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobDto {
  id: string;
  project_id: string;
  seed: number;
  blend_len: number;
  guidance_scale: number | null;
  state: JobState;
  result_motion_ref: string | null;
  error_detail: string | null;
  plan: PlanDto;
  report: ReportDto | null;
}

export interface MotionDto {
  fps: number;
  skeleton: SkeletonDto;
  label: string;
  boundaries?: number[];
  frames: number[][][]; // frames x joints x [x, y, z] meters
}
