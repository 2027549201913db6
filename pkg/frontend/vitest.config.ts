import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    include: ["tests/**/*.test.ts"],
    // the end-to-end test builds a pipeline run and boots the service
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
