import type {
  NetworkDefinition,
  NetworkSummary,
  SessionView,
  StrategyPayload,
  WhatIfView,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = typeof fetch;

/** Thin typed wrapper over the session service; fetch is injectable for tests. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const data = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const code = data?.code ?? "http_error";
      const message = data?.message ?? `${method} ${path} failed (${response.status})`;
      throw new ApiError(response.status, code, message);
    }
    return data as T;
  }

  async listNetworks(): Promise<NetworkSummary[]> {
    const data = await this.request<{ networks: NetworkSummary[] }>("GET", "/networks");
    return data.networks;
  }

  registerNetwork(definition: NetworkDefinition): Promise<NetworkSummary> {
    return this.request("POST", "/networks", definition);
  }

  createSession(network: string, strategy: StrategyPayload): Promise<SessionView> {
    return this.request("POST", "/sessions", { network, strategy });
  }

  getState(sessionId: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  observe(
    sessionId: string,
    node: string,
    value: number,
    override = false,
  ): Promise<SessionView> {
    return this.request("POST", `/sessions/${sessionId}/observe`, {
      node,
      value,
      override,
    });
  }

  whatIf(sessionId: string, node: string): Promise<WhatIfView> {
    return this.request("GET", `/sessions/${sessionId}/whatif?node=${encodeURIComponent(node)}`);
  }

  closeSession(sessionId: string): Promise<unknown> {
    return this.request("POST", `/sessions/${sessionId}/close`);
  }
}
