import { ApiClient } from "./api";
import { ConsoleApp } from "./app";
import { renderError } from "./render";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

async function boot(): Promise<void> {
  const base = el<HTMLInputElement>("api-base");
  const errorBanner = el<HTMLElement>("error");

  let app = new ConsoleApp(new ApiClient(base.value), {
    session: el("session"),
    whatif: el("whatif"),
    error: errorBanner,
    controls: el("controls"),
  });

  const networkSelect = el<HTMLSelectElement>("network");
  const reload = async () => {
    app = new ConsoleApp(new ApiClient(base.value), {
      session: el("session"),
      whatif: el("whatif"),
      error: errorBanner,
      controls: el("controls"),
    });
    try {
      const networks = await app.loadNetworks();
      networkSelect.innerHTML = networks
        .map((n) => `<option value="${n.name}">${n.name} (${n.nodes} nodes)</option>`)
        .join("");
      renderError(errorBanner, null);
    } catch (err) {
      renderError(errorBanner, `cannot reach service at ${base.value}: ${err}`);
    }
  };

  el<HTMLButtonElement>("connect").addEventListener("click", reload);

  el<HTMLFormElement>("start-form").addEventListener("submit", async (event) => {
    event.preventDefault();
    const high = el<HTMLInputElement>("band-high").value;
    const low = el<HTMLInputElement>("band-low").value;
    await app.startSession({
      network: networkSelect.value,
      strategy: {
        mode: el<HTMLSelectElement>("mode").value,
        ev: el<HTMLSelectElement>("ev").value,
        ev_timing: el<HTMLSelectElement>("ev-timing").value,
      },
      band: high || low ? { high: parseFloat(high), low: parseFloat(low) } : undefined,
    });
    refreshWhatIfChoices();
  });

  const refreshWhatIfChoices = () => {
    const select = el<HTMLSelectElement>("whatif-node");
    select.innerHTML = app
      .unobservedLeaves()
      .map((id) => `<option value="${id}">${id}</option>`)
      .join("");
  };

  el<HTMLButtonElement>("btn-true").addEventListener("click", async () => {
    await app.answer(1);
    refreshWhatIfChoices();
  });
  el<HTMLButtonElement>("btn-false").addEventListener("click", async () => {
    await app.answer(0);
    refreshWhatIfChoices();
  });
  el<HTMLButtonElement>("btn-soft").addEventListener("click", async () => {
    await app.answer(parseFloat(el<HTMLInputElement>("soft-value").value));
    refreshWhatIfChoices();
  });
  el<HTMLButtonElement>("btn-whatif").addEventListener("click", () => {
    void app.openWhatIf(el<HTMLSelectElement>("whatif-node").value);
  });
  el("whatif").addEventListener("click", (event) => {
    if ((event.target as HTMLElement).id === "whatif-close") app.closeWhatIf();
  });

  await reload();
}

document.addEventListener("DOMContentLoaded", () => {
  void boot();
});
