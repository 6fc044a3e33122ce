#include "uiknow/reasoning.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "uiknow/error.hpp"
#include "uiknow/serialization.hpp"
#include "uiknow/vision.hpp"

namespace uiknow {

namespace {

// Index one past the brace closing the object that opens at `open`, or npos.
std::size_t match_object(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::string_view last_object(std::string_view text) {
  std::string_view found;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto end = match_object(text, i);
      if (end != std::string_view::npos) {
        found = text.substr(i, end - i);
        i = end;
        continue;
      }
    }
    ++i;
  }
  return found;
}

}  // namespace

Action parse_action(std::string_view text) {
  std::string_view candidate;
  if (const auto marker = text.rfind("Action:"); marker != std::string_view::npos) {
    const auto open = text.find('{', marker);
    if (open != std::string_view::npos) {
      const auto end = match_object(text, open);
      if (end != std::string_view::npos) candidate = text.substr(open, end - open);
    }
  }
  if (candidate.empty()) candidate = last_object(text);
  if (candidate.empty()) throw Error(ErrorKind::UnparseableAction, "no JSON object in model reply");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(candidate);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::UnparseableAction, std::string("invalid action JSON: ") + e.what());
  }
  return action_from_json(j);
}

std::string format_history(const std::vector<Action>& history) {
  if (history.empty()) return "None";
  std::string out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i) out += '\n';
    out += "Step " + std::to_string(i + 1) + ": " + to_catalog_json(history[i]);
  }
  return out;
}

std::string format_tips(const std::vector<std::string>& tips) {
  std::string out;
  for (std::size_t i = 0; i < tips.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(i + 1) + ". " + tips[i];
  }
  return out;
}

std::string render_reasoning_prompt(const PromptTemplate& reasoning, const Observation& observation,
                                    std::string_view goal, const std::vector<Action>& history,
                                    std::string_view tips_block) {
  return reasoning.render({{"task goal", std::string(goal)},
                           {"history", format_history(history)},
                           {"ui elements", describe_elements(observation.elements)},
                           {"knowledge", std::string(tips_block)}});
}

Decision decide_action(ChatClient& chat, const std::string& prompt, const Observation& observation,
                       int retries) {
  const auto request = ChatRequest::user(prompt, {observation.screenshot, annotate_screenshot(observation)});
  Decision decision{act::Wait{}};
  for (int attempt = 0; attempt <= retries; ++attempt) {
    const auto reply = chat.complete(request);
    try {
      decision.action = parse_action(reply);
      return decision;
    } catch (const Error& e) {
      ++decision.unparseable;
      spdlog::warn("event=unparseable_action attempt={} kind={}", attempt, to_string(e.kind()));
    }
  }
  decision.action = act::Wait{};
  decision.fell_back = true;
  return decision;
}

}  // namespace uiknow
