import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // the e2e file spawns the backend once per run; keep files sequential
    fileParallelism: false,
  },
});
