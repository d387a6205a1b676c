#!/usr/bin/env python3
"""Regenerate the bundled sample bank (src/capassess/data/sample_bank.json).

The sample bank is synthetic: realistic close-ended practice questions with
faithful structure and cardinalities (4 processes, 46 process-specific
level-1 questions distributed 12/12/11/11, 127 generic questions across
PA2.1-PA5.2, 151 knowledge items so 22 questions carry no guidance).

Deterministic: running it twice produces identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "capassess" / "data" / "sample_bank.json"

MANAGER = ["ProcessManager"]
PERFORMER = ["ProcessPerformer"]
ALL = ["ProcessManager", "ProcessPerformer", "ExternalStakeholder"]

PROCESSES = [
    ("SLM", "Service Level Management"),
    ("CHG", "Change Management"),
    ("PRB", "Problem Management"),
    ("CFG", "Configuration Management"),
]

# Level-1 (process performance) practices, one block per process.
# Each entry: (practice phrase, roles). The last entry of each block
# deliberately carries no knowledge item.
LEVEL1 = {
    "SLM": [
        ("a catalogue of the services provided is maintained and kept current", ALL),
        ("service level requirements are gathered from the customer before agreements are drafted", MANAGER),
        ("service level agreements are documented and signed off for each service", ALL),
        ("agreed service level targets are measurable and have named measurement sources", PERFORMER),
        ("service performance against agreed targets is monitored continuously", PERFORMER),
        ("service achievement reports are produced and circulated at agreed intervals", PERFORMER),
        ("service review meetings are held with the customer at planned intervals", MANAGER),
        ("breaches of service level targets are investigated and followed up", PERFORMER),
        ("supporting agreements with internal teams and suppliers are aligned with customer commitments", MANAGER),
        ("customer satisfaction with service levels is measured and acted upon", ALL),
        ("service level targets are reviewed and renegotiated when business needs change", MANAGER),
        ("new or changed services are given agreed service levels before they go live", ALL),
    ],
    "CHG": [
        ("every request for change is recorded before any work begins", PERFORMER),
        ("changes are classified by type, impact and urgency", PERFORMER),
        ("the impact and risk of each change are assessed before approval", ALL),
        ("changes are authorised by the appropriate authority before implementation", MANAGER),
        ("a forward schedule of approved changes is published to affected parties", ALL),
        ("changes are built and tested before they are deployed to the live environment", PERFORMER),
        ("a remediation plan exists for each change in case it fails", PERFORMER),
        ("an emergency change procedure exists and is used only for genuine emergencies", MANAGER),
        ("implemented changes are reviewed to confirm they met their objectives", MANAGER),
        ("unsuccessful changes are backed out or remediated in a controlled way", PERFORMER),
        ("change records are updated and closed once implementation is complete", PERFORMER),
        ("unauthorised changes are detected and brought under control", ALL),
    ],
    "PRB": [
        ("problems are recorded with their symptoms and history when they are identified", PERFORMER),
        ("problems are classified and prioritised by business impact", PERFORMER),
        ("the root causes of problems are investigated and diagnosed", PERFORMER),
        ("known errors are recorded together with their workarounds", PERFORMER),
        ("workarounds are communicated to the teams that handle incidents", ALL),
        ("incident trends are analysed proactively to find underlying problems", MANAGER),
        ("problem resolutions are verified before records are closed", PERFORMER),
        ("reviews are held after major problems to capture lessons learned", MANAGER),
        ("recurring incidents are escalated into the problem process", ALL),
        ("the status and progress of open problems is communicated to stakeholders", MANAGER),
        ("knowledge gained from resolved problems is shared and reused", ALL),
    ],
    "CFG": [
        ("the items that make up services are identified and recorded as configuration items", PERFORMER),
        ("each configuration item has a named owner and a defined level of control", MANAGER),
        ("relationships and dependencies between configuration items are recorded", PERFORMER),
        ("configuration baselines are taken before major changes", PERFORMER),
        ("changes to configuration items are recorded so that history can be traced", PERFORMER),
        ("the accuracy of configuration records is audited at planned intervals", MANAGER),
        ("discrepancies found between records and the real environment are corrected", PERFORMER),
        ("configuration information is available to the people and processes that need it", ALL),
        ("access to modify configuration records is controlled", MANAGER),
        ("the status of configuration items is tracked through their lifecycle", ALL),
        ("master copies of software and documentation are stored securely", PERFORMER),
    ],
}

# Generic practices for the management attributes (levels 2-5); asked for
# every assessed process. Trailing entries without knowledge items per
# attribute: two each for PA2.1-PA4.2, three each for PA5.1 and PA5.2
# (optimisation-level guidance is where templated best practice is thinnest).
GENERIC = {
    "PA2.1": [
        ("objectives for the performance of the process are identified and agreed", MANAGER),
        ("process performance objectives are communicated to everyone who works in the process", ALL),
        ("the execution of the process is planned against its objectives", MANAGER),
        ("responsibilities and authorities for performing the process are defined and assigned", MANAGER),
        ("the people performing the process know who is accountable for its results", ALL),
        ("the resources needed to perform the process are identified and made available", MANAGER),
        ("the information needed to perform the process is available when it is needed", PERFORMER),
        ("process performance is monitored against the agreed objectives", MANAGER),
        ("deviations from planned process performance are identified", PERFORMER),
        ("corrective action is taken when process performance deviates from plan", MANAGER),
        ("the workload of the process is scheduled and tracked", PERFORMER),
        ("interfaces between the individuals and groups involved in the process are managed", MANAGER),
        ("communication between the parties involved in the process is effective", ALL),
        ("commitments made by those performing the process are realistic and tracked", PERFORMER),
        ("process plans are adjusted when circumstances change", MANAGER),
        ("stakeholders outside the process are informed about its performance", ALL),
    ],
    "PA2.2": [
        ("requirements for the process's work products are defined", MANAGER),
        ("quality criteria for work products are defined and known to those producing them", PERFORMER),
        ("requirements for documenting and controlling work products are defined", MANAGER),
        ("work products are identified so they can be referred to unambiguously", PERFORMER),
        ("work products are documented to the agreed level of detail", PERFORMER),
        ("work products are placed under an appropriate level of control", PERFORMER),
        ("versions of work products can be distinguished and retrieved", PERFORMER),
        ("changes to controlled work products are traceable", PERFORMER),
        ("work products are reviewed against their requirements", ALL),
        ("defects found in work products are recorded and resolved", PERFORMER),
        ("work products are adjusted as necessary to meet requirements after review", PERFORMER),
        ("the storage of work products protects them from loss or unauthorised change", MANAGER),
        ("work products are made available to those who need them", ALL),
        ("templates or examples exist for recurring work products", PERFORMER),
        ("responsibility for each key work product is assigned", MANAGER),
        ("obsolete work products are clearly marked or withdrawn", PERFORMER),
    ],
    "PA3.1": [
        ("a standard definition of the process is documented and maintained", MANAGER),
        ("the standard process describes the sequence and interaction of its activities", PERFORMER),
        ("guidance exists for tailoring the standard process to specific situations", MANAGER),
        ("the roles needed to perform the process are defined in the standard process", MANAGER),
        ("the competencies required for each process role are defined", MANAGER),
        ("the infrastructure and work environment the process needs are identified in its definition", MANAGER),
        ("methods for monitoring the effectiveness of the standard process are defined", MANAGER),
        ("the standard process definition is kept consistent with related processes", PERFORMER),
        ("people can find and consult the standard process definition easily", ALL),
        ("the standard process identifies the inputs it requires and the outputs it produces", PERFORMER),
        ("entry and exit criteria for key process activities are defined", PERFORMER),
        ("the standard process definition is reviewed and updated at planned intervals", MANAGER),
        ("experience from performing the process feeds back into its definition", ALL),
        ("deviations from the standard process are recorded and evaluated", PERFORMER),
        ("the standard process identifies which records must be kept", PERFORMER),
        ("ownership of the standard process definition is assigned", MANAGER),
    ],
    "PA3.2": [
        ("the process is performed as a tailored version of the standard process", PERFORMER),
        ("tailoring decisions for each deployment of the process are recorded", MANAGER),
        ("roles for each performance of the process are assigned and communicated", MANAGER),
        ("the people assigned to the process have the required competencies", MANAGER),
        ("training is provided where competence gaps exist", MANAGER),
        ("the human resources the deployed process needs are made available", MANAGER),
        ("the infrastructure the deployed process needs is made available", MANAGER),
        ("required process information and documentation are available at the point of use", PERFORMER),
        ("data about the performance of the deployed process is collected", PERFORMER),
        ("collected process data is used to understand how the process behaves", MANAGER),
        ("the deployed process is performed consistently across teams and locations", ALL),
        ("experience from deployment is fed back to improve the standard process", ALL),
        ("suppliers or partners involved in the process follow the deployed definition", MANAGER),
        ("new staff are introduced to the deployed process in a structured way", PERFORMER),
        ("the resources assigned to the process are reviewed for adequacy", MANAGER),
        ("the deployed process's work environment supports performing it correctly", PERFORMER),
    ],
    "PA4.1": [
        ("the information needs of the business for this process are identified", MANAGER),
        ("measurement objectives for the process are derived from business information needs", MANAGER),
        ("quantitative objectives for process performance are established", MANAGER),
        ("the measures used for the process are defined with clear counting rules", PERFORMER),
        ("measurement frequencies and collection responsibilities are defined", MANAGER),
        ("process measures are collected as defined", PERFORMER),
        ("the collected measurement data is validated for accuracy", PERFORMER),
        ("measurement results are analysed against the quantitative objectives", MANAGER),
        ("measurement results are reported to those who need them", ALL),
        ("trends in process performance are identified from the measurements", MANAGER),
        ("measurement results are used when making decisions about the process", MANAGER),
        ("product and service measures are related to process measures where relevant", MANAGER),
        ("the set of measures is reviewed for continued relevance", MANAGER),
        ("historical measurement data is retained for comparison", PERFORMER),
        ("measurement definitions are consistent across teams", PERFORMER),
        ("the cost of measurement is proportionate to its value", ALL),
    ],
    "PA4.2": [
        ("analysis techniques are selected for controlling the process quantitatively", MANAGER),
        ("control limits or thresholds for process performance are established", MANAGER),
        ("process performance is monitored against control limits", PERFORMER),
        ("variation in process performance is analysed to distinguish exceptional from normal causes", MANAGER),
        ("assignable causes of variation are investigated when they appear", MANAGER),
        ("corrective actions address the causes of exceptional variation", MANAGER),
        ("the effectiveness of corrective actions is verified", PERFORMER),
        ("control limits are re-established after significant process changes", MANAGER),
        ("the data used for process control is timely enough to act on", PERFORMER),
        ("those performing the process can see the control measures that apply to them", ALL),
        ("special situations that distort measurements are recorded alongside the data", PERFORMER),
        ("decisions to intervene in the process are based on the analysed data", MANAGER),
        ("process control records are retained and retrievable", PERFORMER),
        ("predicted process performance is compared with actual outcomes", MANAGER),
        ("control thresholds have documented rationales", MANAGER),
        ("out-of-control conditions trigger defined responses", PERFORMER),
    ],
    "PA5.1": [
        ("improvement objectives for the process are defined in support of business goals", MANAGER),
        ("those who work in the process can propose improvements easily", ALL),
        ("improvement proposals are recorded and evaluated", MANAGER),
        ("the analysis of process data is used to identify opportunities for improvement", MANAGER),
        ("sources of innovation outside the organisation are monitored for applicable ideas", MANAGER),
        ("new technologies are evaluated for their potential to improve the process", MANAGER),
        ("the expected impact of proposed improvements is estimated before adoption", MANAGER),
        ("improvement objectives are reviewed as business goals change", MANAGER),
        ("an implementation strategy exists for adopting selected improvements", MANAGER),
        ("pilots or trials are used to test significant process changes", PERFORMER),
        ("the risks of proposed process changes are assessed", MANAGER),
        ("staff are involved in shaping changes to the process they perform", ALL),
        ("improvement work on the process is planned and resourced", MANAGER),
        ("suppliers and partners are included in improvement discussions where relevant", ALL),
        ("lessons from other processes are considered for this process", PERFORMER),
        ("the pipeline of improvement proposals is visible to stakeholders", ALL),
    ],
    "PA5.2": [
        ("the impact of proposed changes is assessed against the process's improvement objectives", MANAGER),
        ("changes to the process are introduced in a managed way", MANAGER),
        ("disruption caused by process changes is minimised through planning", PERFORMER),
        ("the effectiveness of process changes is evaluated against actual results", MANAGER),
        ("process changes that do not deliver the expected benefit are revisited", MANAGER),
        ("improvement results are fed back to those who proposed them", ALL),
        ("the causes of gaps between expected and actual improvement results are analysed", MANAGER),
        ("optimisation of the process considers its interaction with other processes", MANAGER),
        ("the process is adjusted proactively in anticipation of changing demands", MANAGER),
        ("benefits realised from process improvements are recorded", MANAGER),
        ("the organisation's standard process is updated with proven improvements", MANAGER),
        ("improvement actions are tracked to completion", PERFORMER),
        ("performance after a change is compared with performance before it", PERFORMER),
        ("staff are informed about what changed in the process and why", ALL),
        ("the rate and scale of process change is sustainable for the teams involved", ALL),
    ],
}

# How many trailing questions per block carry no knowledge item.
UNCOVERED_TAIL = {"level1": 1, "PA2.1": 2, "PA2.2": 2, "PA3.1": 2, "PA3.2": 2,
                  "PA4.1": 2, "PA4.2": 2, "PA5.1": 3, "PA5.2": 3}

RECOMMENDATION_BY_LEVEL = {
    1: "Make this practice part of the routine operation of the process and check it during service reviews.",
    2: "Plan for it explicitly, assign responsibility for it, and track it as part of managing the process.",
    3: "Anchor it in the organisation's standard definition of the process so every deployment inherits it.",
    4: "Support it with defined measures so its effect on process performance stays visible.",
    5: "Treat it as part of the continual improvement loop and review its contribution to improvement objectives.",
}


def _question(q_id, attribute, scope, phrase, roles, covered, level, items):
    entry = {
        "id": q_id,
        "attribute": attribute,
        "scope": scope,
        "text": f"Do you know if {phrase}?",
        "roles": sorted(roles),
        "knowledge_item": None,
    }
    if covered:
        item_id = f"KI-{q_id}"
        entry["knowledge_item"] = item_id
        items.append({
            "id": item_id,
            "observation": f"It is not well established that {phrase}.",
            "recommendation": f"Ensure that {phrase}. {RECOMMENDATION_BY_LEVEL[level]}",
        })
    return entry


def build_bank() -> dict:
    questions = []
    items: list[dict] = []

    for proc_id, _name in PROCESSES:
        block = LEVEL1[proc_id]
        tail = UNCOVERED_TAIL["level1"]
        for i, (phrase, roles) in enumerate(block, start=1):
            covered = i <= len(block) - tail
            questions.append(_question(
                f"{proc_id}-1.1-{i:02d}", "PA1.1", proc_id, phrase, roles, covered, 1, items,
            ))

    for attr_id, block in GENERIC.items():
        level = int(attr_id[2])
        tail = UNCOVERED_TAIL[attr_id]
        for i, (phrase, roles) in enumerate(block, start=1):
            covered = i <= len(block) - tail
            questions.append(_question(
                f"GEN-{attr_id[2:]}-{i:02d}", attr_id, None, phrase, roles, covered, level, items,
            ))

    return {
        "schema_version": 1,
        "processes": [{"id": pid, "name": name} for pid, name in PROCESSES],
        "questions": questions,
        "knowledge_items": items,
    }


def main():
    bank = build_bank()

    total = len(bank["questions"])
    specific = sum(1 for q in bank["questions"] if q["scope"] is not None)
    assert total == 173, total
    assert specific == 46, specific
    assert total - specific == 127
    assert len(bank["knowledge_items"]) == 151, len(bank["knowledge_items"])

    # Every process must allocate different counts to managers and performers.
    for proc_id, _ in PROCESSES:
        counts = {}
        for role in ("ProcessManager", "ProcessPerformer"):
            counts[role] = sum(
                1 for q in bank["questions"]
                if (q["scope"] in (None, proc_id)) and role in q["roles"]
            )
        assert counts["ProcessManager"] != counts["ProcessPerformer"], (proc_id, counts)

    OUT.write_text(json.dumps(bank, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({total} questions, {len(bank['knowledge_items'])} knowledge items)")


if __name__ == "__main__":
    main()
