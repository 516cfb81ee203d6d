#pragma once
// Error taxonomy shared by every module. One exception type carrying a
// stable code so tests and the CLI can branch on the failure kind.

#include <stdexcept>
#include <string>

namespace uprof {

enum class Errc {
    // core / distributions
    empty_input,
    invalid_distribution,
    // textdist
    invalid_order,
    dimension_mismatch,
    zero_vector,
    // stats
    length_mismatch,
    too_few_samples,
    single_class,
    no_positives,
    all_zero_relevance,
    // backend
    timeout,
    server_error,
    logprobs_unavailable,
    rate_limited,
    dimension_drift,
    invalid_script,
    // pipeline
    missing_slot,
    no_boxed_answer,
    invalid_choice,
    stage_failure,
    insufficient_chains,
    // estimators
    empty_paraphrases,
    // metrics
    unparseable_confidence,
    unparseable_verdict,
    // selection
    empty_candidates,
    missing_runs,
    // synthlab
    invalid_rate,
    too_few_questions,
    // io
    schema_error,
    duplicate_id,
    io_error,
    usage_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace uprof
