/** Small DOM form helpers shared by the console and planner views. */

import type { FieldError } from "./validation.js";

export interface Field {
  root: HTMLElement;
  input: HTMLInputElement | HTMLSelectElement;
  error: HTMLElement;
  setError(message: FieldError): void;
}

export function numberField(label: string, name: string, value: number, step = "any"): Field {
  const root = document.createElement("label");
  root.className = "field";
  const span = document.createElement("span");
  span.textContent = label;
  const input = document.createElement("input");
  input.type = "number";
  input.step = step;
  input.name = name;
  input.value = String(value);
  const error = document.createElement("em");
  error.className = "field-error";
  root.append(span, input, error);
  return { root, input, error, setError: (m) => (error.textContent = m ?? "") };
}

export function textField(label: string, name: string, value = ""): Field {
  const root = document.createElement("label");
  root.className = "field";
  const span = document.createElement("span");
  span.textContent = label;
  const input = document.createElement("input");
  input.type = "text";
  input.name = name;
  input.value = value;
  const error = document.createElement("em");
  error.className = "field-error";
  root.append(span, input, error);
  return { root, input, error, setError: (m) => (error.textContent = m ?? "") };
}

export function selectField(label: string, name: string, options: string[], value: string): Field {
  const root = document.createElement("label");
  root.className = "field";
  const span = document.createElement("span");
  span.textContent = label;
  const input = document.createElement("select");
  input.name = name;
  for (const option of options) {
    const el = document.createElement("option");
    el.value = option;
    el.textContent = option;
    input.appendChild(el);
  }
  input.value = value;
  const error = document.createElement("em");
  error.className = "field-error";
  root.append(span, input, error);
  return { root, input, error, setError: (m) => (error.textContent = m ?? "") };
}

export function checkboxField(label: string, name: string, checked: boolean): Field {
  const root = document.createElement("label");
  root.className = "field checkbox";
  const input = document.createElement("input");
  input.type = "checkbox";
  input.name = name;
  input.checked = checked;
  const span = document.createElement("span");
  span.textContent = label;
  const error = document.createElement("em");
  error.className = "field-error";
  root.append(input, span, error);
  return { root, input, error, setError: (m) => (error.textContent = m ?? "") };
}

export function numberValue(field: Field): number {
  return Number((field.input as HTMLInputElement).value);
}

export function fieldset(legend: string, ...children: HTMLElement[]): HTMLFieldSetElement {
  const set = document.createElement("fieldset");
  const cap = document.createElement("legend");
  cap.textContent = legend;
  set.appendChild(cap);
  for (const child of children) set.appendChild(child);
  return set;
}
