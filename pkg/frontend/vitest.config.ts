import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the integration suite boots a real API server, which takes a while
    testTimeout: 60_000,
    hookTimeout: 120_000,
  },
});
