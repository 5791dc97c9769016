// Render a widget schema into form controls and read values back.
// Controls map 1:1 to schema controls, in schema order.

import type { WidgetControl, WidgetSchema } from "./types.js";

export function renderControls(schema: WidgetSchema, form: HTMLElement): void {
  for (const control of schema.controls) {
    const row = form.ownerDocument.createElement("div");
    row.className = "control-row";
    row.dataset.control = control.name;

    const label = form.ownerDocument.createElement("label");
    label.textContent = control.label;
    label.htmlFor = `control-${control.name}`;
    row.appendChild(label);
    row.appendChild(buildInput(control, form.ownerDocument));
    form.appendChild(row);
  }
}

function buildInput(control: WidgetControl, doc: Document): HTMLElement {
  const id = `control-${control.name}`;
  switch (control.widget) {
    case "dropdown": {
      const select = doc.createElement("select");
      select.id = id;
      select.name = control.name;
      for (const choice of control.choices ?? []) {
        const option = doc.createElement("option");
        option.value = choice;
        option.textContent = choice;
        if (choice === control.default) option.selected = true;
        select.appendChild(option);
      }
      return select;
    }
    case "slider": {
      const input = doc.createElement("input");
      input.type = "range";
      input.id = id;
      input.name = control.name;
      input.min = String(control.min ?? 0);
      input.max = String(control.max ?? 100);
      input.step = String(control.step ?? 1);
      input.value = String(control.default ?? control.min ?? 0);
      return input;
    }
    case "file": {
      const input = doc.createElement("input");
      input.type = "file";
      input.id = id;
      input.name = control.name;
      if (control.accept?.length) input.accept = control.accept.join(",");
      return input;
    }
    default: {
      const input = doc.createElement("input");
      input.type = "text";
      input.id = id;
      input.name = control.name;
      if (control.default !== undefined) input.value = String(control.default);
      return input;
    }
  }
}

export function readValues(schema: WidgetSchema, form: HTMLElement): Record<string, unknown> {
  const values: Record<string, unknown> = {};
  for (const control of schema.controls) {
    const element = form.querySelector<HTMLInputElement | HTMLSelectElement>(`[name="${control.name}"]`);
    if (!element) continue;
    if (control.widget === "slider") {
      values[control.name] = Number(element.value);
    } else if (control.widget === "file") {
      const file = (element as HTMLInputElement).files?.[0];
      values[control.name] = file ? file.name : "";
    } else {
      values[control.name] = element.value;
    }
  }
  return values;
}
