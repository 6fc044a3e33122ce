#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "uiknow/domain.hpp"
#include "uiknow/gateway.hpp"
#include "uiknow/knowledge.hpp"
#include "uiknow/mock_gateway.hpp"
#include "uiknow/prompt_template.hpp"
#include "uiknow/sim_environment.hpp"

namespace uiknow::testing {

std::filesystem::path fixture(const std::string& name);
const TemplateLibrary& template_library();
SimAppModel settings_model();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "uiknow");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path& path);

// ---- vectors and entries

Embedding random_unit(std::mt19937_64& rng, std::size_t dim);
/// Unit vector whose cosine with `base` (unit) is exactly `cos`.
Embedding with_cosine(const Embedding& base, double cos, std::mt19937_64& rng);
KnowledgeEntry make_entry(std::string id, Embedding key, std::vector<std::string> values,
                          std::vector<Embedding> value_embeddings, std::string app = "app");

// ---- observations

UiElement element(int index, Rect bbox, std::optional<std::string> text = std::nullopt, bool visible = true);
Observation noise_observation(std::uint64_t seed, int width, int height, std::vector<UiElement> elements = {});

// ---- prompt inspection

/// Captured "User Goal:" line of a reasoning prompt, or empty.
std::string goal_of(const std::string& prompt);
bool history_empty(const std::string& prompt);
bool is_reasoning(const std::string& prompt);
bool is_task_generator(const std::string& prompt);
bool is_mining(const std::string& prompt);
bool is_ranker(const std::string& prompt);
std::string action_reply(const std::string& action_json);

/// Parsed "UI element N: ..." lines of a reasoning prompt.
struct PromptElement {
  int index = 0;
  std::string text;
  std::string content_description;
  bool clickable = false;
  bool visible = true;
};
std::vector<PromptElement> prompt_elements(const std::string& prompt);
/// Numbered tips under the "Here are some tips" heading.
std::vector<std::string> prompt_tips(const std::string& prompt);

// ---- scripted behaviour for the settings fixture

/// content_description of each home icon -> title of the screen it opens.
std::map<std::string, std::string> icon_titles(const SimAppModel& model);

/// Explorer mock: the task generator answers "Tap element N" items drawn from
/// `rng`; reasoning clicks element N first, then reports completion.
ResponderChatClient::Responder tap_explorer(std::shared_ptr<std::mt19937_64> rng, int max_index = 4);

/// Guidance-effect mock.
///  - mining describes an icon as "Tapping the <cd> icon opens the <title> settings page."
///  - reasoning completes when the goal's title is on screen, clicks the icon
///    a tip names for that title, or else clicks the first clickable element.
///  - the ranker prefers the tip mentioning the goal's title.
ResponderChatClient::Responder guidance_responder(std::map<std::string, std::string> titles);
/// Goal for a screen title, e.g. "Open the Wi-Fi settings".
std::string goal_for(const std::string& title);

Gateway mock_gateway(ResponderChatClient::Responder responder, std::size_t dim = 256);

}  // namespace uiknow::testing
