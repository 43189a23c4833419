import { ApiClient, ApiError } from "./api";
import type { NetworkDefinition, NetworkSummary, SessionView, StrategyPayload } from "./types";
import { buildViewModel } from "./viewmodel";
import { clearWhatIf, renderError, renderSession, renderWhatIf } from "./render";

export interface StartOptions {
  network: string;
  strategy: StrategyPayload;
  /** Optional root decision band; registers a network variant when set. */
  band?: { high: number; low: number };
}

export interface ConsoleDom {
  session: HTMLElement;
  whatif: HTMLElement;
  error: HTMLElement;
  controls: HTMLElement;
}

/** Validate the start form before anything touches the service. */
export function validateStart(options: StartOptions): string | null {
  if (!options.network) return "pick a network";
  if (!options.strategy.mode) return "pick a strategy mode";
  if (options.band) {
    const { high, low } = options.band;
    if (Number.isNaN(high) || Number.isNaN(low)) return "thresholds must be numbers";
    if (low > high) return `threshold low (${low}) must not exceed high (${high})`;
    if (high > 1 || low < 0) return "thresholds must lie in [0, 1]";
  }
  return null;
}

export class ConsoleApp {
  private networks: NetworkSummary[] = [];
  private definition: NetworkDefinition | null = null;
  private view: SessionView | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly dom: ConsoleDom,
  ) {}

  get currentView(): SessionView | null {
    return this.view;
  }

  async loadNetworks(): Promise<NetworkSummary[]> {
    this.networks = await this.api.listNetworks();
    return this.networks;
  }

  async startSession(options: StartOptions): Promise<void> {
    const problem = validateStart(options);
    if (problem) {
      renderError(this.dom.error, problem);
      return;
    }
    try {
      const summary = this.networks.find((n) => n.name === options.network);
      if (!summary) throw new ApiError(404, "not_found", `unknown network ${options.network}`);
      let definition = summary.definition;
      if (options.band) {
        definition = await this.registerBandVariant(definition, options.band);
      }
      const view = await this.api.createSession(definition.name, options.strategy);
      this.definition = definition;
      this.view = view;
      renderError(this.dom.error, null);
      this.redraw();
    } catch (err) {
      this.view = null;
      this.showError(err);
    }
  }

  /** Same tree, different root band, registered under a derived name. */
  private async registerBandVariant(
    definition: NetworkDefinition,
    band: { high: number; low: number },
  ): Promise<NetworkDefinition> {
    const root = definition.nodes.find((n) => n.kind === "root");
    if (!root) throw new ApiError(400, "validation", "network has no root");
    const variant: NetworkDefinition = {
      ...definition,
      name: `${definition.name}@${band.high}-${band.low}`,
      thresholds: { ...definition.thresholds, [root.id]: band },
    };
    const summary = await this.api.registerNetwork(variant);
    return summary.definition;
  }

  async answer(value: number): Promise<void> {
    if (!this.view || !this.view.suggestion) return;
    await this.observe(this.view.suggestion, value, false);
  }

  async observe(node: string, value: number, override: boolean): Promise<void> {
    if (!this.view) return;
    try {
      this.view = await this.api.observe(this.view.session_id, node, value, override);
      renderError(this.dom.error, null);
      clearWhatIf(this.dom.whatif);
      this.redraw();
    } catch (err) {
      this.showError(err);
      if (err instanceof ApiError && err.status === 409) {
        await this.refresh(); // stale view: reload confirmed state
      }
    }
  }

  async openWhatIf(node: string): Promise<void> {
    if (!this.view || !this.definition) return;
    try {
      const preview = await this.api.whatIf(this.view.session_id, node);
      renderWhatIf(
        this.dom.whatif,
        preview,
        this.view.posteriors,
        this.definition.nodes.map((n) => n.id),
      );
      renderError(this.dom.error, null);
    } catch (err) {
      this.showError(err);
    }
  }

  closeWhatIf(): void {
    clearWhatIf(this.dom.whatif);
  }

  async refresh(): Promise<void> {
    if (!this.view) return;
    try {
      this.view = await this.api.getState(this.view.session_id);
      this.redraw();
    } catch (err) {
      this.showError(err);
    }
  }

  unobservedLeaves(): string[] {
    if (!this.view || !this.definition) return [];
    const parents = new Set(this.definition.links.map((l) => l.parent));
    return this.definition.nodes
      .map((n) => n.id)
      .filter((id) => !parents.has(id) && !(id in this.view!.evidence));
  }

  private redraw(): void {
    if (!this.view || !this.definition) return;
    renderSession(this.dom.session, buildViewModel(this.definition, this.view));
    this.syncControls();
  }

  private syncControls(): void {
    const active = this.view?.status === "active";
    for (const button of this.dom.controls.querySelectorAll("button, input, select")) {
      (button as HTMLButtonElement).disabled = !active;
    }
  }

  private showError(err: unknown): void {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    renderError(this.dom.error, message);
  }
}
