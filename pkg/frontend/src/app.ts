// Controller: one session per browser tab, one in-flight mutation at a
// time. The session id is kept in sessionStorage so a refresh resumes
// at the server's current round.

import { ApiClient, ApiRequestError } from "./api.js";
import { renderApp, type RenderHandlers } from "./render.js";
import {
  canSubmit,
  errorState,
  fromSession,
  setRating,
  type SessionViewState,
} from "./state.js";

const STORAGE_PREFIX = "emorank.session.";

export class ElicitationApp {
  state: SessionViewState | null = null;
  private inFlight = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly candidateId: string,
    private readonly storage: Storage = sessionStorage,
  ) {}

  private get storageKey(): string {
    return `${STORAGE_PREFIX}${this.candidateId}`;
  }

  private handlers(): RenderHandlers {
    return {
      onRate: (variantId, value) => this.rate(variantId, value),
      onSubmit: () => {
        void this.submit();
      },
      onRetry: () => {
        void this.start();
      },
    };
  }

  private apply(state: SessionViewState): void {
    this.state = state;
    renderApp(this.root, state, this.handlers());
  }

  /** Create a session, or resume the stored one at the server's round. */
  async start(): Promise<void> {
    try {
      const storedId = this.storage.getItem(this.storageKey);
      if (storedId) {
        try {
          this.apply(fromSession(await this.api.getSession(storedId)));
          return;
        } catch (exc) {
          if (exc instanceof ApiRequestError && exc.status === 404) {
            this.storage.removeItem(this.storageKey); // stale id; start over
          } else {
            throw exc;
          }
        }
      }
      const payload = await this.api.createSession(this.candidateId);
      this.storage.setItem(this.storageKey, payload.session_id);
      this.apply(fromSession(payload));
    } catch (exc) {
      this.apply(errorState(this.state, String(exc)));
    }
  }

  rate(variantId: string, value: number): void {
    if (!this.state) return;
    this.apply(setRating(this.state, variantId, value));
  }

  /** Submit the current round. Re-entry while in flight is a no-op, so a
   * double-click produces exactly one server mutation. */
  async submit(): Promise<void> {
    if (!this.state || this.inFlight || !canSubmit(this.state)) return;
    this.inFlight = true;
    const submitting: SessionViewState = { ...this.state, phase: "submitting" };
    this.apply(submitting);
    const roundIndex = submitting.roundIndex;
    const ratings = { ...submitting.pending };
    try {
      const payload = await this.submitWithRetry(ratings, roundIndex);
      this.apply(fromSession(payload));
    } catch (exc) {
      if (exc instanceof ApiRequestError && exc.status === 409) {
        // state conflict: trust the server, reload the session
        try {
          const payload = await this.api.getSession(submitting.sessionId);
          this.apply(fromSession(payload));
        } catch (reloadExc) {
          this.apply(errorState(this.state, String(reloadExc)));
        }
      } else {
        this.apply(errorState(this.state, String(exc)));
      }
    } finally {
      this.inFlight = false;
    }
  }

  /** One retry on network failure; round_index makes the replay safe. */
  private async submitWithRetry(
    ratings: Record<string, number>,
    roundIndex: number,
  ) {
    if (!this.state) throw new Error("no session");
    const sessionId = this.state.sessionId;
    try {
      return await this.api.submitRatings(sessionId, ratings, roundIndex);
    } catch (exc) {
      if (exc instanceof ApiRequestError) throw exc; // server spoke; don't retry
      return await this.api.submitRatings(sessionId, ratings, roundIndex);
    }
  }
}
