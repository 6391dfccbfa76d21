#pragma once

#include <memory>
#include <string>

namespace panoworld::eqa {

/// Decides whether an agent's reasoning matches the reference reasoning.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual bool judge(const std::string& context, const std::string& agent_rationale,
                     const std::string& gold_rationale) const = 0;
  virtual std::string name() const = 0;
  virtual bool external() const { return false; }
};

/// Exact match after lower-casing, collapsing whitespace and dropping
/// trailing punctuation. Deterministic; used in tests and offline runs.
class StubJudge : public Judge {
 public:
  bool judge(const std::string& context, const std::string& agent_rationale,
             const std::string& gold_rationale) const override;
  std::string name() const override { return "stub"; }
  static std::string normalize(const std::string& text);
};

inline constexpr const char* kDefaultJudgePrompt =
    "You grade the reasoning of a driving agent.\n"
    "Situation: {context}\n"
    "Reference reasoning: {gold}\n"
    "Agent reasoning: {agent}\n"
    "Does the agent's reasoning reach the same conclusion for the same reason as the reference? "
    "Reply with JSON {\"verdict\": \"correct\"} or {\"verdict\": \"incorrect\"}.";

/// POSTs {"prompt", "context", "agent", "reference"}; accepts
/// {"verdict": "correct"|"incorrect"} or {"correct": bool}.
class HttpJudge : public Judge {
 public:
  explicit HttpJudge(std::string url, std::string prompt_template = kDefaultJudgePrompt)
      : url_(std::move(url)), template_(std::move(prompt_template)) {}
  bool judge(const std::string& context, const std::string& agent_rationale,
             const std::string& gold_rationale) const override;
  std::string name() const override { return "http"; }
  bool external() const override { return true; }

 private:
  std::string url_;
  std::string template_;
};

/// "stub" | "http:<url>".
std::unique_ptr<Judge> make_judge(const std::string& spec);

/// Replaces every "{key}" in `text`.
std::string fill_template(std::string text, const std::string& key, const std::string& value);

}  // namespace panoworld::eqa
