import { SurveyPage } from "./survey_page.js";

const page = new SurveyPage({ document });
page.mount();
