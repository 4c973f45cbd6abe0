import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    globalSetup: ["tests/globalSetup.ts"],
    testTimeout: 30_000,
    hookTimeout: 120_000,
    // integration tests mutate shared service state; keep files sequential
    fileParallelism: false,
    environment: "node",
  },
});
