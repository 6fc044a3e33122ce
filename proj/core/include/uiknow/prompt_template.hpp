#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace uiknow {

using Bindings = std::map<std::string, std::string>;

/// Text with `{name}` slots, where a name is lower-case words
/// (`[a-z][a-z0-9_ ]*`). Anything else in braces, such as the JSON in the
/// action catalog, is literal text.
class PromptTemplate {
 public:
  PromptTemplate(std::string name, std::string body);

  const std::string& name() const noexcept { return name_; }
  const std::string& body() const noexcept { return body_; }
  const std::set<std::string>& required_placeholders() const noexcept { return required_; }

  /// Single pass, non-recursive: bound values are inserted literally even if
  /// they contain braces. Throws MissingPlaceholder for an unbound slot;
  /// extra bindings are ignored.
  std::string render(const Bindings& bindings) const;

 private:
  struct Segment {
    bool slot;
    std::string text;
  };
  std::string name_;
  std::string body_;
  std::vector<Segment> segments_;
  std::set<std::string> required_;
};

namespace templates {
inline constexpr std::string_view kTaskGoalGenerator = "task_goal_generator";
inline constexpr std::string_view kTaskGoalGeneratorScreenshotOnly = "task_goal_generator_screenshot_only";
inline constexpr std::string_view kKnowledgeMining = "transition_knowledge_mining";
inline constexpr std::string_view kKnowledgeRanker = "knowledge_ranker";
inline constexpr std::string_view kReasoning = "reasoning";
inline constexpr std::string_view kKrbPrior = "krb_prior_knowledge";
inline constexpr std::string_view kKrbDynamic = "krb_dynamic_comprehension";
inline constexpr std::string_view kKrbPriorRetrieval = "krb_prior_knowledge_retrieval";
inline constexpr std::string_view kKrbDynamicRetrieval = "krb_dynamic_comprehension_retrieval";
inline constexpr std::string_view kKrbPriorRanked = "krb_prior_knowledge_ranked";
inline constexpr std::string_view kKrbDynamicRanked = "krb_dynamic_comprehension_ranked";
}  // namespace templates

/// Directory of `<name>.txt` templates, loaded eagerly.
class TemplateLibrary {
 public:
  explicit TemplateLibrary(const std::filesystem::path& directory);

  /// $UIKNOW_TEMPLATES, then the source tree, then the install prefix.
  static std::filesystem::path default_directory();
  static TemplateLibrary load_default() { return TemplateLibrary(default_directory()); }

  /// Throws TemplateNotFound.
  const PromptTemplate& get(std::string_view name) const;
  bool contains(std::string_view name) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace uiknow
