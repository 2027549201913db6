import { ReviewApi } from "./api.js";
import { ReviewApp } from "./app.js";

document.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (root) {
    new ReviewApp(root, new ReviewApi("")).renderStart();
  }
});
