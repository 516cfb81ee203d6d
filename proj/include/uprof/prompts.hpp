#pragma once
// Prompt templates for every pipeline stage and task type, plus the
// metric prompts. Defaults are embedded; a directory of text files can
// override them (one file per template, e.g. answer_mc.txt).

#include <map>
#include <string>
#include <vector>

#include "uprof/core.hpp"

namespace uprof {

// Slot values for template substitution: {q} question, {c} choices,
// {p} passage, {a} previous answer, {prev} prior answers (IPT).
using PromptSlots = std::map<std::string, std::string>;

class PromptRegistry {
public:
    // Embedded default templates.
    PromptRegistry();

    // Template keys: paraphrase, clarify, answer_mc, answer_rc,
    // answer_essay, self_check_mc, self_check_rc, self_check_essay,
    // vc, ptrue, ipt_suffix.
    const std::string& raw(const std::string& key) const;

    std::string stage_key(Stage stage, TaskType task) const;

    // Substitutes slots verbatim; throws Errc::missing_slot when the
    // template references a slot that was not provided.
    std::string render(const std::string& key, const PromptSlots& slots) const;
    std::string render_stage(Stage stage, TaskType task, const PromptSlots& slots) const;

    // Loads *.txt files from a directory, replacing matching keys.
    // Returns warnings for overrides that differ from the embedded text.
    std::vector<std::string> load_overrides(const std::string& dir);

    static const PromptRegistry& embedded();

private:
    std::map<std::string, std::string> templates_;
};

// "A. <text>; B. <text>; ..." for the {c} slot.
std::string format_choices(const std::vector<std::string>& choices);

} // namespace uprof
