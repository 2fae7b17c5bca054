import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the walkthrough suite boots the real backend process
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
