import { DialogClient } from "./api.js";
import { ChatController } from "./store.js";
import { mountChat } from "./ui.js";

/** Service base URL: `?api=http://host:port` wins, same-origin otherwise. */
function baseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return (fromQuery ?? window.location.origin).replace(/\/$/, "");
}

const controller = new ChatController(new DialogClient(baseUrl()));
mountChat(document.getElementById("app")!, controller);
