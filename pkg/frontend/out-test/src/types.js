/** Wire types mirroring the workbench HTTP API. */
export {};
