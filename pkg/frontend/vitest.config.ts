import { defineConfig } from "vitest/config";

// Every binding call shells out to the CLI, so whole-suite timings are
// dominated by process startup; give the long equivalence loops headroom.
export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    testTimeout: 600_000,
    hookTimeout: 60_000,
  },
});
