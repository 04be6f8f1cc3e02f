import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["tests/**/*.test.ts"],
    // the end-to-end test boots the real backend server, which is slow to
    // import on first run
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
