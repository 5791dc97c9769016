import { Window } from "happy-dom";
import { describe, expect, it } from "vitest";

import type { WidgetSchema } from "../src/types.js";
import { readValues, renderControls } from "../src/widgets.js";

const SCHEMA: WidgetSchema = {
  app_title: "Demo",
  schema_version: 1,
  controls: [
    { name: "day", widget: "dropdown", label: "Day of Week", default: "Monday", choices: ["Monday", "Tuesday"] },
    { name: "county_name", widget: "text", label: "County Name", default: "Sacramento" },
    { name: "threshold", widget: "slider", label: "Threshold", min: 0, max: 10, step: 2, default: 4 },
    { name: "upload", widget: "file", label: "Data file", accept: [".csv"] },
  ],
};

function makeForm(): HTMLElement {
  const window = new Window();
  const doc = window.document as unknown as Document;
  const form = doc.createElement("form");
  doc.body.appendChild(form);
  return form;
}

describe("widget rendering", () => {
  it("controls map 1:1 to schema controls in order", () => {
    const form = makeForm();
    renderControls(SCHEMA, form);
    const rows = [...form.querySelectorAll(".control-row")];
    expect(rows.map((row) => (row as HTMLElement).dataset.control)).toEqual([
      "day", "county_name", "threshold", "upload",
    ]);
  });

  it("dropdown carries choices and label verbatim", () => {
    const form = makeForm();
    renderControls(SCHEMA, form);
    const select = form.querySelector("select[name=day]") as HTMLSelectElement;
    expect([...select.options].map((o) => o.value)).toEqual(["Monday", "Tuesday"]);
    const label = form.querySelector(".control-row label") as HTMLLabelElement;
    expect(label.textContent).toBe("Day of Week");
  });

  it("slider carries bounds and reads back as a number", () => {
    const form = makeForm();
    renderControls(SCHEMA, form);
    const slider = form.querySelector("input[name=threshold]") as HTMLInputElement;
    expect([slider.min, slider.max, slider.step]).toEqual(["0", "10", "2"]);
    const values = readValues(SCHEMA, form);
    expect(values.threshold).toBe(4);
    expect(values.day).toBe("Monday");
    expect(values.county_name).toBe("Sacramento");
  });

  it("empty schema renders no controls", () => {
    const form = makeForm();
    renderControls({ app_title: "Empty", schema_version: 1, controls: [] }, form);
    expect(form.querySelectorAll(".control-row").length).toBe(0);
  });
});
