#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "surveysim/backend/backend.hpp"

namespace surveysim::backend {

// Which requests a mock rule applies to. Empty lists match anything.
struct MockMatcher {
    std::vector<std::string> respondents;
    std::vector<std::string> questions;
    std::vector<std::string> methods;
    std::vector<std::string> steps;
    std::optional<std::string> constraint;  // "unconstrained", "choice_set", "json_schema"
    std::optional<std::string> system_contains;
    std::optional<std::string> user_contains;

    bool matches(const GenerationRequest& request) const;
};

enum class MockBehaviorKind {
    echo_truth,            // answer with the respondent's ground truth
    uniform_distribution,  // equal mass on every presented option
    token_distribution,    // fixed first-token probabilities
    fixed_text,
    garbage,       // text naming no option; ignores constraints
    partial_json,  // probabilities for the first presented option only; ignores constraints
    fail,          // throws BackendError(error_kind)
};

struct MockBehavior {
    MockBehaviorKind kind = MockBehaviorKind::echo_truth;
    std::string text;
    std::vector<std::pair<std::string, double>> tokens;  // (token text, probability)
    std::optional<std::string> reasoning;
    bool ignore_constraints = false;
    ErrorKind error_kind = ErrorKind::transport;
};

struct MockRule {
    MockMatcher match;
    MockBehavior behavior;
};

struct MockScript {
    std::vector<MockRule> rules;
    std::optional<MockBehavior> fallback;
    bool strict = false;  // unmatched requests throw when true and no fallback exists
    Capabilities capabilities{true, true, true, 20, true};
};

// (question id, respondent id) -> option id.
using TruthTable = std::map<std::pair<std::string, std::string>, std::string>;

MockScript parse_mock_script(const nlohmann::ordered_json& document);
MockScript load_mock_script(const std::filesystem::path& path);
MockBehavior parse_mock_behavior(const nlohmann::ordered_json& document);

// Deterministic scripted backend. The first matching rule wins.
class MockBackend final : public Backend {
public:
    MockBackend(MockScript script, TruthTable truths = {});

    Capabilities capabilities() const override { return script_.capabilities; }
    GenerationResult generate(const GenerationRequest& request) override;

    std::size_t call_count() const { return calls_.load(); }
    std::size_t call_count(const std::string& step) const;

private:
    GenerationResult respond(const GenerationRequest& request, const MockBehavior& behavior) const;

    MockScript script_;
    TruthTable truths_;
    std::atomic<std::size_t> calls_{0};
    mutable std::mutex mutex_;
    std::map<std::string, std::size_t> calls_by_step_;
};

std::unique_ptr<MockBackend> script_mock(MockScript script, TruthTable truths = {});

}  // namespace surveysim::backend
