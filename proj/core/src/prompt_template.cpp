#include "uiknow/prompt_template.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "uiknow/error.hpp"

namespace uiknow {

namespace {

bool slot_start(char c) { return c >= 'a' && c <= 'z'; }
bool slot_char(char c) { return slot_start(c) || (c >= '0' && c <= '9') || c == '_' || c == ' '; }

}  // namespace

PromptTemplate::PromptTemplate(std::string name, std::string body)
    : name_(std::move(name)), body_(std::move(body)) {
  std::string literal;
  std::size_t i = 0;
  while (i < body_.size()) {
    if (body_[i] == '{' && i + 1 < body_.size() && slot_start(body_[i + 1])) {
      std::size_t j = i + 1;
      while (j < body_.size() && slot_char(body_[j])) ++j;
      if (j < body_.size() && body_[j] == '}' && body_[j - 1] != ' ') {
        if (!literal.empty()) segments_.push_back({false, std::move(literal)});
        literal.clear();
        auto slot = body_.substr(i + 1, j - i - 1);
        required_.insert(slot);
        segments_.push_back({true, std::move(slot)});
        i = j + 1;
        continue;
      }
    }
    literal += body_[i++];
  }
  if (!literal.empty()) segments_.push_back({false, std::move(literal)});
}

std::string PromptTemplate::render(const Bindings& bindings) const {
  std::string out;
  out.reserve(body_.size());
  for (const auto& seg : segments_) {
    if (!seg.slot) {
      out += seg.text;
      continue;
    }
    auto it = bindings.find(seg.text);
    if (it == bindings.end()) {
      throw Error(ErrorKind::MissingPlaceholder, "template '" + name_ + "' needs {" + seg.text + "}");
    }
    out += it->second;
  }
  return out;
}

TemplateLibrary::TemplateLibrary(const std::filesystem::path& directory) {
  std::error_code ec;
  if (!std::filesystem::is_directory(directory, ec)) {
    throw Error(ErrorKind::TemplateNotFound, "template directory " + directory.string() + " not found");
  }
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream body;
    body << in.rdbuf();
    auto name = entry.path().stem().string();
    templates_.emplace(name, PromptTemplate(name, body.str()));
  }
}

std::filesystem::path TemplateLibrary::default_directory() {
  if (const char* env = std::getenv("UIKNOW_TEMPLATES"); env && *env) return env;
  std::error_code ec;
  if (std::filesystem::is_directory(UIKNOW_BUILD_TEMPLATE_DIR, ec)) return UIKNOW_BUILD_TEMPLATE_DIR;
  return UIKNOW_INSTALL_TEMPLATE_DIR;
}

const PromptTemplate& TemplateLibrary::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw Error(ErrorKind::TemplateNotFound, "no template named '" + std::string(name) + "'");
  }
  return it->second;
}

bool TemplateLibrary::contains(std::string_view name) const { return templates_.find(name) != templates_.end(); }

}  // namespace uiknow
