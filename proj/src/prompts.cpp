#include "uprof/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace uprof {
namespace {

const char* kParaphrase =
    "Paraphrase the following question, without changing its meaning.\n"
    "Make sure you only output a single question only.\n"
    "Question: {q}\n"
    "Paraphrased Question:";

const char* kClarify =
    "Clarify the following question by rewriting it in a clearer, more complete form.\n"
    "If the question is ambiguous, add missing details to make it understandable.\n"
    "Make sure you only output a single question only.\n"
    "Original Question: {q}\n"
    "Clarified Question:";

const char* kAnswerMc =
    "Please answer the following question. Think carefully and in a step-by-step fashion.\n"
    "At the end of your solution, indicate your final answer by writing the answer choice "
    "(A, B, C, D, or E) inside a boxed environment, like: \\boxed{A}.\n"
    "Q: {q}\n"
    "Choices: {c}\n"
    "Your answer:";

const char* kSelfCheckMc =
    "Following is your previous response to the question.\n"
    "Q: {q}\n"
    "Choices: {c}\n"
    "Your previous response: {a}\n"
    "\n"
    "Check your previous response carefully and solve the same question again.\n"
    "At the end of your solution, indicate your final answer by writing one of the answer "
    "choice (only letter : A, B, C, D, or E) inside a boxed environment, like: \\boxed{A}.\n"
    "Output:";

const char* kAnswerRc =
    "Read the following passage and answer the question.\n"
    "Passage : {p}\n"
    "Question : {q}\n"
    "At the end of your solution, indicate your final answer inside a boxed environment, "
    "like: \\boxed{answer}.";

const char* kSelfCheckRc =
    "Following is your previous response to the question:\n"
    "Read the following passage and answer the question.\n"
    "Passage : {p}\n"
    "Question : {q}\n"
    "\n"
    "Your previous response: {a}\n"
    "Check your previous response carefully and respond the question again.\n"
    "At the end of your solution, indicate your final answer inside a boxed environment, "
    "like: \\boxed{answer}.";

const char* kAnswerEssay =
    "Please answer the following question.\n"
    "Think carefully and in a step-by-step fashion.\n"
    "At the end of your solution, put your final result in a boxed environment, "
    "e.g. \\boxed{answer}.\n"
    "Q: {q}";

const char* kSelfCheckEssay =
    "Following is your previous response to the question.\n"
    "Q: {q}\n"
    "Your previous response: {a}\n"
    "Check your previous response carefully and solve the same question again step by step.\n"
    "At the end of your solution, put your final result in a boxed environment, "
    "eg. (\\boxed{answer}).\n"
    "Output:";

const char* kVc =
    "Q: {q}\n"
    "Your answer: {a}\n"
    "State your confidence that your answer is correct as an integer from 0 to 100. "
    "Confidence:";

const char* kPtrue =
    "Q: {q}\n"
    "Proposed answer: {a}\n"
    "Is the proposed answer true? Answer True or False.\n"
    "Answer:";

const char* kIptSuffix = "\nPreviously given answers: {prev}";

// Slots each template is expected to consume; render() checks presence.
const std::map<std::string, std::vector<std::string>>& required_slots() {
    static const std::map<std::string, std::vector<std::string>> req{
        {"paraphrase", {"q"}},
        {"clarify", {"q"}},
        {"answer_mc", {"q", "c"}},
        {"answer_rc", {"q", "p"}},
        {"answer_essay", {"q"}},
        {"self_check_mc", {"q", "c", "a"}},
        {"self_check_rc", {"q", "p", "a"}},
        {"self_check_essay", {"q", "a"}},
        {"vc", {"q", "a"}},
        {"ptrue", {"q", "a"}},
        {"ipt_suffix", {"prev"}},
    };
    return req;
}

} // namespace

PromptRegistry::PromptRegistry() {
    templates_ = {
        {"paraphrase", kParaphrase},
        {"clarify", kClarify},
        {"answer_mc", kAnswerMc},
        {"answer_rc", kAnswerRc},
        {"answer_essay", kAnswerEssay},
        {"self_check_mc", kSelfCheckMc},
        {"self_check_rc", kSelfCheckRc},
        {"self_check_essay", kSelfCheckEssay},
        {"vc", kVc},
        {"ptrue", kPtrue},
        {"ipt_suffix", kIptSuffix},
    };
}

const PromptRegistry& PromptRegistry::embedded() {
    static const PromptRegistry reg;
    return reg;
}

const std::string& PromptRegistry::raw(const std::string& key) const {
    auto it = templates_.find(key);
    if (it == templates_.end())
        fail(Errc::schema_error, "unknown prompt template '" + key + "'");
    return it->second;
}

std::string PromptRegistry::stage_key(Stage stage, TaskType task) const {
    switch (stage) {
        case Stage::paraphrase: return "paraphrase";
        case Stage::clarify: return "clarify";
        case Stage::answer: return std::string("answer_") + task_type_name(task);
        case Stage::self_check: return std::string("self_check_") + task_type_name(task);
    }
    return "answer_mc";
}

std::string PromptRegistry::render(const std::string& key, const PromptSlots& slots) const {
    std::string out = raw(key);
    auto req_it = required_slots().find(key);
    if (req_it != required_slots().end()) {
        for (const auto& slot : req_it->second) {
            if (!slots.count(slot))
                fail(Errc::missing_slot,
                     "template '" + key + "' requires slot {" + slot + "}");
        }
    }
    for (const auto& [name, value] : slots) {
        const std::string needle = "{" + name + "}";
        size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return out;
}

std::string PromptRegistry::render_stage(Stage stage, TaskType task,
                                         const PromptSlots& slots) const {
    return render(stage_key(stage, task), slots);
}

std::vector<std::string> PromptRegistry::load_overrides(const std::string& dir) {
    std::vector<std::string> warnings;
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        fail(Errc::io_error, "prompt directory '" + dir + "' not found");
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        const std::string key = entry.path().stem().string();
        if (!templates_.count(key)) {
            warnings.push_back("ignoring unknown template file " + entry.path().string());
            continue;
        }
        std::ifstream in(entry.path());
        std::ostringstream body;
        body << in.rdbuf();
        std::string text = body.str();
        // strip one trailing newline added by editors
        if (!text.empty() && text.back() == '\n') text.pop_back();
        if (text != PromptRegistry::embedded().raw(key))
            warnings.push_back("template '" + key + "' differs from the embedded default");
        templates_[key] = std::move(text);
    }
    return warnings;
}

std::string format_choices(const std::vector<std::string>& choices) {
    static const char* kLetters = "ABCDE";
    std::string out;
    for (size_t i = 0; i < choices.size() && i < 5; ++i) {
        if (!out.empty()) out += "; ";
        out += kLetters[i];
        out += ". ";
        out += choices[i];
    }
    return out;
}

} // namespace uprof
