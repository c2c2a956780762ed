#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace vqa::agents {

using Bindings = std::map<std::string, std::string>;

/// Template body with `{name}` placeholders. Substituted values are inserted
/// verbatim and never re-scanned, so they may contain braces.
class PromptTemplate {
 public:
  PromptTemplate() = default;
  PromptTemplate(std::string name, std::string body);

  const std::string& name() const noexcept { return name_; }
  const std::string& body() const noexcept { return body_; }
  const std::set<std::string>& placeholders() const noexcept { return placeholders_; }

  /// Throws ConfigError if a placeholder has no binding. Extra bindings are ignored.
  std::string render(const Bindings& bindings) const;

 private:
  std::string name_;
  std::string body_;
  std::set<std::string> placeholders_;
};

/// Placeholder names found in `body`, in the `{identifier}` form.
std::set<std::string> find_placeholders(const std::string& body);

/// All agent prompts. Built-ins are compiled in from `prompts/`; a directory
/// passed to `load` overrides any file it contains.
class PromptLibrary {
 public:
  static PromptLibrary builtin();
  static PromptLibrary load(const std::filesystem::path& dir);

  const PromptTemplate& get(const std::string& name) const;
  const std::vector<std::string>& caption_prompts() const noexcept { return captions_; }

  static const std::vector<std::string>& template_names();

 private:
  static PromptLibrary from_files(const std::map<std::string, std::string>& files);

  std::map<std::string, PromptTemplate> templates_;
  std::vector<std::string> captions_;
};

/// Generated at build time from the files in `prompts/`.
const std::map<std::string, std::string>& builtin_prompt_files();

}  // namespace vqa::agents
