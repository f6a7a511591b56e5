/** Types mirroring the engine's HTTP payloads (docs/http-api.md). */
export {};
