// Weight tuner: client-side validation mirrors the service's PUT rules so a
// bad edit never even leaves the browser; the server's 422 remains the
// authority when it does.

import { ApiClient, ApiError } from "./client.js";
import { CONTRIBUTION_LABELS } from "./types.js";

export interface WeightValidation {
  ok: boolean;
  errors: Record<string, string>;
}

export function validateWeights(weights: Record<string, number>): WeightValidation {
  const errors: Record<string, string> = {};
  for (const label of CONTRIBUTION_LABELS) {
    const value = weights[label];
    if (value === undefined || Number.isNaN(value)) {
      errors[label] = "required";
    } else if (value < 0) {
      errors[label] = "must be ≥ 0";
    }
  }
  if (weights["na"] !== undefined && weights["na"] !== 0) {
    errors["na"] = "locked at 0";
  }
  for (const label of Object.keys(weights)) {
    if (!(CONTRIBUTION_LABELS as readonly string[]).includes(label)) {
      errors[label] = "unknown label";
    }
  }
  return { ok: Object.keys(errors).length === 0, errors };
}

export class WeightTuner {
  weights: Record<string, number> = {};
  errors: Record<string, string> = {};
  serverError: string | null = null;
  saved = false;

  constructor(private readonly client: ApiClient) {}

  async load(): Promise<void> {
    const response = await this.client.getWeights();
    this.weights = { ...response.weights };
    this.errors = {};
    this.serverError = null;
  }

  edit(label: string, value: number): void {
    this.weights[label] = value;
    this.errors = validateWeights(this.weights).errors;
    this.saved = false;
  }

  /** Persist the edit. Returns false (without any request) when local
   * validation fails; surfaces a 422 inline when the server disagrees. */
  async save(): Promise<boolean> {
    const validation = validateWeights(this.weights);
    this.errors = validation.errors;
    if (!validation.ok) return false;
    try {
      const response = await this.client.putWeights(this.weights);
      this.weights = { ...response.weights };
      this.serverError = null;
      this.saved = true;
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 422) {
        this.serverError = error.message;
        return false;
      }
      throw error;
    }
  }
}
