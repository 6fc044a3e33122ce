#include "support.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "uiknow/error.hpp"

namespace uiknow::testing {

namespace fs = std::filesystem;

fs::path fixture(const std::string& name) { return fs::path(UIKNOW_TEST_FIXTURES) / name; }

const TemplateLibrary& template_library() {
  static const TemplateLibrary library(UIKNOW_TEST_TEMPLATES);
  return library;
}

SimAppModel settings_model() { return SimAppModel::load(fixture("settings_app.json")); }

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (;;) {
    auto candidate = fs::temp_directory_path() /
                     (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    if (fs::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Embedding random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> normal;
  std::vector<double> v(dim);
  for (auto& x : v) x = normal(rng);
  return Embedding::normalize(std::move(v));
}

Embedding with_cosine(const Embedding& base, double cos, std::mt19937_64& rng) {
  auto u = random_unit(rng, base.dimension()).values;
  double dot = 0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * base.values[i];
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= dot * base.values[i];
  const auto ortho = Embedding::normalize(std::move(u));
  const double sin = std::sqrt(std::max(0.0, 1.0 - cos * cos));
  std::vector<double> out(base.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = cos * base.values[i] + sin * ortho.values[i];
  return Embedding::normalize(std::move(out));
}

KnowledgeEntry make_entry(std::string id, Embedding key, std::vector<std::string> values,
                          std::vector<Embedding> value_embeddings, std::string app) {
  KnowledgeEntry e;
  e.id = std::move(id);
  e.app = std::move(app);
  e.key_patch = Image(4, 3, {10, 20, 30});
  e.key_embedding = std::move(key);
  e.values = std::move(values);
  e.value_embeddings = std::move(value_embeddings);
  e.provenance.push_back({e.id, 0});
  return e;
}

UiElement element(int index, Rect bbox, std::optional<std::string> text, bool visible) {
  UiElement e;
  e.index = index;
  e.bbox = bbox;
  e.text = std::move(text);
  e.clickable = true;
  e.visible = visible;
  return e;
}

Observation noise_observation(std::uint64_t seed, int width, int height, std::vector<UiElement> elements) {
  std::mt19937_64 rng(seed);
  Observation o;
  o.screenshot = Image(width, height);
  for (auto& b : o.screenshot.bytes()) b = static_cast<std::uint8_t>(rng());
  o.elements = std::move(elements);
  o.source_app = "noise";
  return o;
}

std::string goal_of(const std::string& prompt) {
  static const std::regex re("User Goal: ([^\\n]*)");
  std::smatch m;
  return std::regex_search(prompt, m, re) ? m[1].str() : std::string();
}

bool history_empty(const std::string& prompt) {
  return prompt.find("Action History:\nNone\n") != std::string::npos;
}

bool is_reasoning(const std::string& prompt) { return prompt.find("## Action Catalog") != std::string::npos; }
bool is_task_generator(const std::string& prompt) {
  return prompt.find("generate a comprehensive list of practical user tasks") != std::string::npos;
}
bool is_mining(const std::string& prompt) {
  return prompt.find("Objective: Describe the functionality") != std::string::npos;
}
bool is_ranker(const std::string& prompt) {
  return prompt.find("Respond ONLY with a integer value") != std::string::npos;
}

std::string action_reply(const std::string& action_json) {
  return "Reasoning: scripted.\nAction: " + action_json;
}

std::vector<PromptElement> prompt_elements(const std::string& prompt) {
  static const std::regex line("^UI element (\\d+):(.*)$", std::regex::multiline);
  static const std::regex text_re(" text=\"([^\"]*)\"");
  static const std::regex cd_re(" content_description=\"([^\"]*)\"");
  std::vector<PromptElement> out;
  for (std::sregex_iterator it(prompt.begin(), prompt.end(), line), end; it != end; ++it) {
    PromptElement e;
    e.index = std::stoi((*it)[1].str());
    const auto rest = (*it)[2].str();
    std::smatch m;
    if (std::regex_search(rest, m, text_re)) e.text = m[1].str();
    if (std::regex_search(rest, m, cd_re)) e.content_description = m[1].str();
    e.clickable = rest.find("clickable=true") != std::string::npos;
    e.visible = rest.find("visible=false") == std::string::npos;
    out.push_back(e);
  }
  return out;
}

std::vector<std::string> prompt_tips(const std::string& prompt) {
  const std::string head = "Here are some tips for you:\n";
  const auto start = prompt.find(head);
  if (start == std::string::npos) return {};
  const auto stop = prompt.find("## Response Format", start);
  std::istringstream block(prompt.substr(start + head.size(), stop - start - head.size()));
  static const std::regex item("^\\d+\\. (.*)$");
  std::vector<std::string> tips;
  for (std::string l; std::getline(block, l);) {
    std::smatch m;
    if (std::regex_match(l, m, item)) tips.push_back(m[1].str());
  }
  return tips;
}

std::map<std::string, std::string> icon_titles(const SimAppModel& model) {
  std::map<std::string, std::string> out;
  const auto& home = model.screens.at(model.initial_screen);
  for (const auto& rule : home.rules) {
    if (rule.action != "click" || !rule.index || !rule.target) continue;
    for (const auto& se : home.elements) {
      if (se.element.index != *rule.index || !se.element.content_description) continue;
      const auto& target = model.screens.at(*rule.target);
      out[*se.element.content_description] = target.elements.at(0).element.text.value();
    }
  }
  return out;
}

ResponderChatClient::Responder tap_explorer(std::shared_ptr<std::mt19937_64> rng, int max_index) {
  auto mutex = std::make_shared<std::mutex>();
  return [rng, max_index, mutex](const ChatRequest& request) -> std::string {
    const auto prompt = request.text();
    if (is_task_generator(prompt)) {
      std::vector<int> order;
      for (int i = 0; i <= max_index; ++i) order.push_back(i);
      {
        std::lock_guard lock(*mutex);
        std::shuffle(order.begin(), order.end(), *rng);
      }
      std::string list;
      for (std::size_t i = 0; i < order.size(); ++i) {
        list += std::to_string(i + 1) + ". Tap element " + std::to_string(order[i]) + "\n";
      }
      return list;
    }
    if (is_reasoning(prompt)) {
      static const std::regex tap("Tap element (\\d+)");
      std::smatch m;
      const auto goal = goal_of(prompt);
      if (history_empty(prompt) && std::regex_search(goal, m, tap)) {
        return action_reply("{\"action_type\": \"click\", \"index\": " + m[1].str() + "}");
      }
      return action_reply(R"({"action_type": "status", "goal_status": "complete"})");
    }
    if (is_ranker(prompt)) return "1";
    return "Tapping this element changes the screen.";
  };
}

std::string goal_for(const std::string& title) { return "Open the " + title + " settings"; }

namespace {

std::string title_of_goal(const std::string& goal) {
  static const std::regex re("^Open the (.+) settings$");
  std::smatch m;
  return std::regex_match(goal, m, re) ? m[1].str() : std::string();
}

std::string click(int index) { return action_reply(R"({"action_type": "click", "index": )" + std::to_string(index) + "}"); }

}  // namespace

ResponderChatClient::Responder guidance_responder(std::map<std::string, std::string> titles) {
  return [titles = std::move(titles)](const ChatRequest& request) -> std::string {
    const auto prompt = request.text();
    if (is_task_generator(prompt)) {
      std::string list;
      for (int i = 1; i <= 10; ++i) list += std::to_string(i) + ". Tap element " + std::to_string(i) + "\n";
      return list;
    }
    if (is_mining(prompt)) {
      static const std::regex cd_re("content_description: \"([^\"]*)\"");
      static const std::regex text_re("text: \"([^\"]*)\"");
      std::smatch m;
      if (std::regex_search(prompt, m, cd_re)) {
        const auto it = titles.find(m[1].str());
        if (it != titles.end()) return "Tapping the " + it->first + " icon opens the " + it->second + " settings page.";
        return "Tapping the " + m[1].str() + " button goes back.";
      }
      if (std::regex_search(prompt, m, text_re)) return "Tapping " + m[1].str() + " changes this page.";
      return "Tapping this element changes the page.";
    }
    if (is_ranker(prompt)) {
      static const std::regex goal_re("instruction: (.*), determine");
      static const std::regex a_re("Knowledge A: ([^\\n]*)");
      static const std::regex b_re("Knowledge B: ([^\\n]*)");
      std::smatch g, a, b;
      if (std::regex_search(prompt, g, goal_re) && std::regex_search(prompt, a, a_re) &&
          std::regex_search(prompt, b, b_re)) {
        const auto title = title_of_goal(g[1].str());
        if (!title.empty() && a[1].str().find(title) == std::string::npos &&
            b[1].str().find(title) != std::string::npos) {
          return "2";
        }
      }
      return "1";
    }
    if (is_reasoning(prompt)) {
      const auto goal = goal_of(prompt);
      const auto elements = prompt_elements(prompt);
      static const std::regex tap("^Tap element (\\d+)$");
      std::smatch m;
      if (std::regex_match(goal, m, tap)) {
        if (history_empty(prompt)) return click(std::stoi(m[1].str()));
        return action_reply(R"({"action_type": "status", "goal_status": "complete"})");
      }
      const auto title = title_of_goal(goal);
      for (const auto& e : elements) {
        if (e.visible && e.text == title) {
          return action_reply(R"({"action_type": "status", "goal_status": "complete"})");
        }
      }
      static const std::regex icon_re("the (\\S+) icon opens the (.+) settings page");
      for (const auto& tip : prompt_tips(prompt)) {
        std::smatch t;
        if (!std::regex_search(tip, t, icon_re) || t[2].str() != title) continue;
        for (const auto& e : elements) {
          if (e.visible && e.content_description == t[1].str()) return click(e.index);
        }
      }
      for (const auto& e : elements) {
        if (e.visible && e.clickable) return click(e.index);
      }
      return action_reply(R"({"action_type": "wait"})");
    }
    return "1";
  };
}

Gateway mock_gateway(ResponderChatClient::Responder responder, std::size_t dim) {
  return {std::make_shared<ResponderChatClient>(std::move(responder)), std::make_shared<HashingEmbedder>(dim, 0)};
}

}  // namespace uiknow::testing
