#include "panoworld/eqa/judge.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/http_json.hpp"

#include <cctype>

namespace panoworld::eqa {

std::string StubJudge::normalize(const std::string& text) {
  std::string out;
  bool space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  while (!out.empty() && std::ispunct(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

bool StubJudge::judge(const std::string&, const std::string& agent_rationale, const std::string& gold_rationale) const {
  return !gold_rationale.empty() && normalize(agent_rationale) == normalize(gold_rationale);
}

std::string fill_template(std::string text, const std::string& key, const std::string& value) {
  const std::string token = "{" + key + "}";
  for (std::size_t pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size())) {
    text.replace(pos, token.size(), value);
  }
  return text;
}

bool HttpJudge::judge(const std::string& context, const std::string& agent_rationale,
                      const std::string& gold_rationale) const {
  std::string prompt = fill_template(template_, "context", context);
  prompt = fill_template(prompt, "gold", gold_rationale);
  prompt = fill_template(prompt, "agent", agent_rationale);
  const nlohmann::json reply = net::post_json(
      url_, {{"prompt", prompt}, {"context", context}, {"agent", agent_rationale}, {"reference", gold_rationale}});
  if (reply.contains("correct") && reply["correct"].is_boolean()) return reply["correct"].get<bool>();
  if (reply.contains("verdict") && reply["verdict"].is_string()) {
    const std::string v = StubJudge::normalize(reply["verdict"].get<std::string>());
    if (v == "correct") return true;
    if (v == "incorrect") return false;
  }
  throw Error(ErrorKind::Protocol, "judge reply has no verdict", reply.dump());
}

std::unique_ptr<Judge> make_judge(const std::string& spec) {
  if (spec == "stub") return std::make_unique<StubJudge>();
  if (spec.rfind("http:", 0) == 0) return std::make_unique<HttpJudge>(spec.substr(5));
  throw Error(ErrorKind::Usage, "unknown judge " + spec);
}

}  // namespace panoworld::eqa
