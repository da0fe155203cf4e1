// Client-side mirror of the server project with optimistic edits.
// An optimistic mutation applies immediately, remembers the pre-mutation
// snapshot, and is reconciled when the server acks (replace with server
// truth) or rolls back on rejection.

import type { ProjectDto, StepDto } from "./types.js";

export type Listener = () => void;

export function optimisticReplaceStep(steps: StepDto[], next: StepDto): StepDto[] {
  return steps.map((s) => (s.id === next.id ? next : s));
}

export function optimisticRemoveStep(steps: StepDto[], id: string): StepDto[] {
  return steps.filter((s) => s.id !== id);
}

export class ProjectStore {
  project: ProjectDto | null = null;
  offline = false;
  pendingEdits = 0;
  private snapshots = new Map<number, ProjectDto>();
  private nextToken = 1;
  private listeners: Listener[] = [];

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  setOffline(offline: boolean): void {
    if (this.offline !== offline) {
      this.offline = offline;
      this.emit();
    }
  }

  // authoritative server snapshot replaces local state
  fromServer(project: ProjectDto): void {
    this.project = project;
    this.emit();
  }

  /** Apply a local mutation now; returns a token for reconcile/rollback. */
  beginOptimistic(mutate: (draft: ProjectDto) => void): number {
    if (this.project === null) throw new Error("no project loaded");
    const token = this.nextToken++;
    this.snapshots.set(token, structuredClone(this.project));
    const draft = structuredClone(this.project);
    mutate(draft);
    this.project = draft;
    this.pendingEdits++;
    this.emit();
    return token;
  }

  /** Server acked: drop the snapshot and adopt server truth when provided. */
  commit(token: number, serverProject?: ProjectDto): void {
    if (this.snapshots.delete(token)) this.pendingEdits--;
    if (serverProject) this.project = serverProject;
    this.emit();
  }

  /** Server rejected: restore the pre-mutation snapshot. */
  rollback(token: number): void {
    const snapshot = this.snapshots.get(token);
    if (snapshot) {
      this.snapshots.delete(token);
      this.pendingEdits--;
      this.project = snapshot;
      this.emit();
    }
  }

  stepById(id: string): StepDto | undefined {
    return this.project?.steps.find((s) => s.id === id);
  }

  groupOf(stepId: string): string | null {
    for (const group of this.project?.groups ?? []) {
      if (group.step_ids.includes(stepId)) return group.id;
    }
    return null;
  }
}
