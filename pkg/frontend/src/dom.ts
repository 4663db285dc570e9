/** Minimal DOM helpers; all display strings come from the view models. */

export function h(
  tag: string,
  attrs: Record<string, string | ((event: Event) => void)> = {},
  ...children: (Node | string)[]
): HTMLElement {
  const el = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      el.addEventListener(key, value);
    } else {
      el.setAttribute(key, value);
    }
  }
  el.append(...children);
  return el;
}

export function svgStepPlot(pathData: string, width: number, height: number): SVGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "step-plot");
  const path = document.createElementNS("http://www.w3.org/2000/svg", "path");
  path.setAttribute("d", pathData);
  path.setAttribute("fill", "none");
  path.setAttribute("stroke", "currentColor");
  path.setAttribute("stroke-width", "1.5");
  svg.append(path);
  return svg;
}

export function clear(el: HTMLElement): void {
  while (el.firstChild) {
    el.removeChild(el.firstChild);
  }
}

export function fieldErrorList(errors: { field: string; message: string }[]): HTMLElement {
  const list = h("ul", { class: "errors" });
  for (const err of errors) {
    list.append(h("li", {}, `${err.field}: ${err.message}`));
  }
  return list;
}
