/** Bootstrap: wire the controller to the page and restore the session from
 * the URL hash so a reload reconstructs identical state from the service. */
import { ApiClient } from "./api.js";
import { WorkbenchController } from "./controller.js";
import { render } from "./render.js";
const SAMPLE = `def_start
    event DetectUserFallen
    event CallEmergencySupport
    measure emergencyLevel: scale(L1, L2, L3, L4, L5)
def_end
rule_start
    R1 when DetectUserFallen then CallEmergencySupport within 2 minutes
        unless emergencyLevel > L4 then CallEmergencySupport
    R2 when DetectUserFallen and emergencyLevel < L2 then not CallEmergencySupport within 2 minutes
rule_end
`;
async function start() {
    const api = new ApiClient("");
    const controller = new WorkbenchController(api, (state) => render(state));
    const editor = document.getElementById("editor");
    editor.addEventListener("input", () => controller.setEditorText(editor.value));
    document.getElementById("check-btn").addEventListener("click", () => {
        void controller.runCheck();
    });
    document.getElementById("verdicts").addEventListener("click", (event) => {
        const target = event.target;
        if (target.matches("button.explain-btn")) {
            void controller.explain(Number(target.dataset.verdict));
        }
    });
    document.getElementById("explanation").addEventListener("click", (event) => {
        const target = event.target;
        if (target.matches("button.apply-btn")) {
            void controller.applySuggestion(Number(target.dataset.which) === 2 ? 2 : 1);
        }
    });
    const existing = window.location.hash.match(/#s=([0-9a-f]+)/);
    if (existing) {
        try {
            await controller.restore(existing[1]);
            return;
        }
        catch {
            window.location.hash = "";
        }
    }
    await controller.newSession();
    window.location.hash = `#s=${controller.state.sessionId}`;
    controller.setEditorText(SAMPLE);
}
void start();
