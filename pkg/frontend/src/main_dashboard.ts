import { DashboardPage } from "./dashboard_page.js";

const page = new DashboardPage({ document });
page.mount();
