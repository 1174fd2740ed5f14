/** Scripted end-to-end loop against a real service with the mock provider.
 *
 * No browser is available in this environment, so the test drives the
 * controller (the exact code behind the page's buttons) through the same
 * fetch calls and asserts the rendered-state equivalents: one conflict
 * card, an explanation with two suggestions, zero verdicts after applying
 * suggestion 1, and iterations = 2 in the metrics strip.
 */
import assert from "node:assert/strict";
import { spawn } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { after, before, test } from "node:test";
import { ApiClient } from "../src/api.js";
import { WorkbenchController } from "../src/controller.js";
import { describeMetrics, restoreFromSession } from "../src/state.js";
const REPO_ROOT = join(import.meta.dirname, "..", "..", "..");
const FIXTURE = readFileSync(join(REPO_ROOT, "src", "sleec_workbench", "fixtures", "r1r2.sleec"), "utf-8");
let server;
let base;
async function waitForHealth(url) {
    const deadline = Date.now() + 20000;
    let lastError = null;
    while (Date.now() < deadline) {
        try {
            const response = await fetch(`${url}/api/health`);
            if (response.ok) {
                return;
            }
        }
        catch (err) {
            lastError = err;
        }
        await new Promise((resolve) => setTimeout(resolve, 200));
    }
    throw new Error(`service never came up: ${lastError}`);
}
before(async () => {
    const port = 18000 + Math.floor(Math.random() * 20000);
    base = `http://127.0.0.1:${port}`;
    server = spawn("python3", [
        "-m",
        "sleec_workbench.cli",
        "serve",
        "--port",
        String(port),
        "--data-dir",
        mkdtempSync(join(tmpdir(), "sleec-e2e-")),
    ], {
        cwd: REPO_ROOT,
        env: { ...process.env, SLEEC_LLM_PROVIDER: "mock" },
        stdio: ["ignore", "ignore", "pipe"],
    });
    await waitForHealth(base);
});
after(() => {
    server.kill("SIGINT");
});
test("conflict -> explanation -> apply -> resolved, iterations = 2", async () => {
    const api = new ApiClient(base);
    const controller = new WorkbenchController(api, () => { }, "assistive care robot");
    await controller.newSession();
    controller.setEditorText(FIXTURE);
    await controller.runCheck();
    assert.equal(controller.state.verdicts.length, 1, "expected one conflict card");
    assert.equal(controller.state.verdicts[0].kind, "deadlock");
    assert.deepEqual(controller.state.verdicts[0].rules, ["R1", "R2"]);
    assert.equal(controller.state.verdicts[0].trace, "<DetectUserFallen, emergencyLevel.L1, tock, tock>");
    await controller.explain(0);
    const report = controller.state.explanation;
    assert.ok(report, "expected an explanation card");
    assert.equal(report["Conflicting Rules"].Error.Category, "deadlock");
    assert.ok(report["Conflicting Rules"].Resolution.Suggestion1.SLEEC.length > 0);
    assert.ok(report["Conflicting Rules"].Resolution.Suggestion2.SLEEC.length > 0);
    await controller.applySuggestion(1);
    assert.equal(controller.state.verdicts.length, 0, "expected zero verdicts after the fix");
    assert.notEqual(controller.state.editorText, FIXTURE, "editor shows the rewritten ruleset");
    assert.equal(controller.state.timeline.length, 2);
    assert.ok(controller.state.metrics);
    assert.equal(controller.state.metrics.resolved, true);
    assert.equal(controller.state.metrics.iterations, 2);
    assert.equal(describeMetrics(controller.state.metrics).startsWith("iterations: 2"), true);
});
test("reload reconstructs identical state from the stored session", async () => {
    const api = new ApiClient(base);
    const controller = new WorkbenchController(api, () => { });
    await controller.newSession();
    controller.setEditorText(FIXTURE);
    await controller.runCheck();
    const sessionId = controller.state.sessionId;
    const restored = restoreFromSession(await api.getSession(sessionId));
    assert.deepEqual(restored.verdicts, controller.state.verdicts);
    assert.deepEqual(restored.timeline, controller.state.timeline);
    assert.equal(restored.editorText, controller.state.editorText);
});
test("service errors surface as a banner and preserve the editor", async () => {
    const api = new ApiClient("http://127.0.0.1:9"); // nothing listens here
    const controller = new WorkbenchController(api, () => { });
    controller.state = { ...controller.state, sessionId: "dead" };
    controller.setEditorText("some text");
    await controller.runCheck();
    assert.ok(controller.state.banner, "expected an error banner");
    assert.equal(controller.state.editorText, "some text");
});
