import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    environmentOptions: {
      happyDOM: {
        // The replay suite talks to a real server on a random local port.
        settings: { fetch: { disableSameOriginPolicy: true } },
      },
    },
    include: ["tests/**/*.test.ts"],
    // The scenario suite boots the real Python server once; give it room.
    testTimeout: 60_000,
    hookTimeout: 120_000,
  },
});
