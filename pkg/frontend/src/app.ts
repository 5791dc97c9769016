// Portal shell: session handling and a tiny hash router.

import { ApiClient } from "./api.js";
import {
  appRunnerView,
  auditView,
  myAppsView,
  registryView,
  reviewQueueView,
  uploadView,
  type Session,
} from "./views.js";

const ROUTES = ["upload", "apps", "review", "registry", "audit"] as const;

export function startPortal(doc: Document): void {
  const root = doc.getElementById("portal");
  if (!root) throw new Error("missing #portal element");

  const token = doc.defaultView?.sessionStorage.getItem("appforge-token") ?? promptForToken(doc);
  // roles/user id ride in sessionStorage next to the token; the server is
  // authoritative and simply rejects anything the badge UI got wrong
  const userId = doc.defaultView?.sessionStorage.getItem("appforge-user") ?? "";
  const roles = (doc.defaultView?.sessionStorage.getItem("appforge-roles") ?? "author").split(",");
  const session: Session = { client: new ApiClient({ token }), userId, roles };

  const nav = doc.createElement("nav");
  for (const route of ROUTES) {
    const link = doc.createElement("a");
    link.href = `#/${route}`;
    link.textContent = route;
    nav.appendChild(link);
  }
  const main = doc.createElement("main");
  root.replaceChildren(nav, main);

  const render = () => {
    const hash = doc.defaultView?.location.hash ?? "#/apps";
    const [, route = "apps", arg] = hash.replace(/^#\//, "").split("/") as (string | undefined)[];
    void dispatch(session, main, route ?? "apps", arg);
  };
  doc.defaultView?.addEventListener("hashchange", render);
  render();
}

function promptForToken(doc: Document): string {
  const token = doc.defaultView?.prompt("appforge bearer token") ?? "";
  doc.defaultView?.sessionStorage.setItem("appforge-token", token);
  return token;
}

async function dispatch(session: Session, main: HTMLElement, route: string, arg?: string): Promise<void> {
  switch (route) {
    case "upload":
      return uploadView(session, main);
    case "review":
      return reviewQueueView(session, main);
    case "registry":
      return registryView(session, main);
    case "audit":
      return auditView(session, main);
    case "run":
      return appRunnerView(session, main, arg ?? "");
    case "preview":
      return appRunnerView(session, main, "", arg);
    default:
      return myAppsView(session, main);
  }
}
