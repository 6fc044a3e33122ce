#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "uiknow/action.hpp"
#include "uiknow/domain.hpp"
#include "uiknow/gateway.hpp"
#include "uiknow/prompt_template.hpp"

namespace uiknow {

/// Decodes a model reply: the JSON object after the last "Action:" marker,
/// else the last balanced JSON object anywhere in the text.
/// Throws UnparseableAction, UnknownActionType or MissingField.
Action parse_action(std::string_view text);

/// "Step N: <catalog json>" per line, "None" when empty.
std::string format_history(const std::vector<Action>& history);

/// "1. tip" per line; empty string for no tips.
std::string format_tips(const std::vector<std::string>& tips);

std::string render_reasoning_prompt(const PromptTemplate& reasoning, const Observation& observation,
                                    std::string_view goal, const std::vector<Action>& history,
                                    std::string_view tips_block);

struct Decision {
  Action action;
  /// Replies that failed to parse before this decision.
  int unparseable = 0;
  /// True when every attempt failed and Wait was substituted.
  bool fell_back = false;
};

/// Asks the model for one action, sending the raw and the annotated screenshot.
/// Unparseable replies are retried `retries` times, then Wait is returned.
/// Gateway errors propagate.
Decision decide_action(ChatClient& chat, const std::string& prompt, const Observation& observation,
                       int retries);

}  // namespace uiknow
