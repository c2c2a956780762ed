#include "vqa/core/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <variant>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa {

namespace {

using Value = std::variant<std::string, std::int64_t, double, bool>;

std::string describe(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

Value parse_value(std::string_view raw, std::size_t line) {
  const auto v = text::trim(raw);
  if (v.empty()) throw ConfigError("missing value (line " + std::to_string(line) + ")");
  if (v.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < v.size() && v[i] != '"'; ++i) {
      if (v[i] != '\\') {
        out.push_back(v[i]);
        continue;
      }
      if (++i >= v.size()) break;
      switch (v[i]) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: throw ConfigError("bad escape in string (line " + std::to_string(line) + ")");
      }
    }
    if (i >= v.size()) throw ConfigError("unterminated string (line " + std::to_string(line) + ")");
    auto rest = text::trim(std::string_view(v).substr(i + 1));
    if (!rest.empty() && rest.front() != '#') {
      throw ConfigError("trailing characters after string (line " + std::to_string(line) + ")");
    }
    return out;
  }
  auto bare = text::trim(v.substr(0, v.find('#')));
  if (bare == "true") return true;
  if (bare == "false") return false;
  std::int64_t i = 0;
  auto [p, ec] = std::from_chars(bare.data(), bare.data() + bare.size(), i);
  if (ec == std::errc() && p == bare.data() + bare.size()) return i;
  double d = 0;
  auto [pd, ecd] = std::from_chars(bare.data(), bare.data() + bare.size(), d);
  if (ecd == std::errc() && pd == bare.data() + bare.size()) return d;
  throw ConfigError("cannot parse value '" + bare + "' (line " + std::to_string(line) + ")");
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

std::string format_double(double d) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, p);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

struct Setter {
  std::string key;
  std::function<void(const Value&)> apply;
};

template <class T>
T expect(const Value& v, const std::string& key);

template <>
std::string expect<std::string>(const Value& v, const std::string& key) {
  if (auto* s = std::get_if<std::string>(&v)) return *s;
  throw ConfigError("config key '" + key + "' expects a string");
}

template <>
std::int64_t expect<std::int64_t>(const Value& v, const std::string& key) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw ConfigError("config key '" + key + "' expects an integer");
}

template <>
double expect<double>(const Value& v, const std::string& key) {
  if (auto* d = std::get_if<double>(&v)) return *d;
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw ConfigError("config key '" + key + "' expects a number");
}

std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (base.empty() || p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_absolute() || p.find("://") != std::string::npos) return p;
  return (base / path).lexically_normal().string();
}

void apply_backend_key(BackendSpec& spec, const std::string& key, const Value& v,
                       const std::string& where, const std::filesystem::path& base) {
  const auto name = describe(where, key);
  if (key == "kind") {
    const auto kind = expect<std::string>(v, name);
    if (kind == "http") spec.kind = BackendSpec::Kind::Http;
    else if (kind == "scripted") spec.kind = BackendSpec::Kind::Scripted;
    else throw ConfigError("config key '" + name + "' must be \"http\" or \"scripted\"");
  } else if (key == "endpoint") {
    spec.endpoint = expect<std::string>(v, name);
  } else if (key == "model") {
    spec.model = expect<std::string>(v, name);
  } else if (key == "api_key_env") {
    spec.api_key_env = expect<std::string>(v, name);
  } else if (key == "script" || key == "fixture") {
    spec.script = resolve(expect<std::string>(v, name), base);
  } else if (key == "cache_dir") {
    spec.cache_dir = resolve(expect<std::string>(v, name), base);
  } else if (key == "timeout_s") {
    spec.timeout_s = static_cast<int>(expect<std::int64_t>(v, name));
  } else {
    throw ConfigError("unknown config key '" + name + "'");
  }
}

void write_backend(std::ostringstream& out, const std::string& header, const BackendSpec& b) {
  out << "\n[" << header << "]\n";
  out << "kind = " << quote(b.kind == BackendSpec::Kind::Http ? "http" : "scripted") << "\n";
  if (!b.endpoint.empty()) out << "endpoint = " << quote(b.endpoint) << "\n";
  if (!b.model.empty()) out << "model = " << quote(b.model) << "\n";
  if (!b.api_key_env.empty()) out << "api_key_env = " << quote(b.api_key_env) << "\n";
  if (!b.script.empty()) out << "script = " << quote(b.script) << "\n";
  if (!b.cache_dir.empty()) out << "cache_dir = " << quote(b.cache_dir) << "\n";
  out << "timeout_s = " << b.timeout_s << "\n";
}

}  // namespace

void RunConfig::validate() const {
  if (max_iterations < 1) throw ConfigError("config key 'max_iterations' must be >= 1");
  if (confidence_threshold < 1 || confidence_threshold > 5) {
    throw ConfigError("config key 'confidence_threshold' must be in 1..5");
  }
  if (max_sub_questions < 1) throw ConfigError("config key 'max_sub_questions' must be >= 1");
  if (k_shot < 0) throw ConfigError("config key 'k_shot' must be >= 0");
  if (fixed_iterations < 0) throw ConfigError("config key 'fixed_iterations' must be >= 0");
  if (workers < 1) throw ConfigError("config key 'workers' must be >= 1");
  if (retrieval_top_n < 1) throw ConfigError("config key 'retrieval_top_n' must be >= 1");
  if (retrieval_min_similarity < -1.0 || retrieval_min_similarity > 1.0) {
    throw ConfigError("config key 'retrieval_min_similarity' must be in [-1, 1]");
  }
  auto check = [](const BackendSpec& b, const std::string& where) {
    if (b.kind == BackendSpec::Kind::Http && b.endpoint.empty()) {
      throw ConfigError("config key '" + where + ".endpoint' is required for http backends");
    }
    if (b.kind == BackendSpec::Kind::Scripted && b.script.empty()) {
      throw ConfigError("config key '" + where + ".script' is required for scripted backends");
    }
    if (b.timeout_s < 1) throw ConfigError("config key '" + where + ".timeout_s' must be >= 1");
  };
  for (const auto& [name, b] : chat_backends) check(b, "backend." + name);
  if (text_embedder) check(*text_embedder, "embedder.text");
  if (image_embedder) check(*image_embedder, "embedder.image");
}

std::optional<BackendSpec> RunConfig::backend_for(AgentRole role) const {
  if (auto it = chat_backends.find(text::to_lower(to_string(role))); it != chat_backends.end()) {
    return it->second;
  }
  if (auto it = chat_backends.find("default"); it != chat_backends.end()) return it->second;
  return std::nullopt;
}

RunConfig parse_config(std::string_view source, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::string section;
  BackendSpec* backend = nullptr;
  std::set<std::string> seen;

  auto set_path = [&](std::optional<std::string>& field, const Value& v, const std::string& key) {
    field = resolve(expect<std::string>(v, key), base_dir);
  };
  auto as_int = [](const Value& v, const std::string& key) {
    return static_cast<int>(expect<std::int64_t>(v, key));
  };

  std::size_t line_no = 0;
  for (const auto& raw : text::split_lines(source)) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      auto close = line.find(']');
      if (close == std::string::npos) {
        throw ConfigError("unterminated section header (line " + std::to_string(line_no) + ")");
      }
      section = text::trim(std::string_view(line).substr(1, close - 1));
      if (!seen.insert("[" + section + "]").second) {
        throw ConfigError("duplicate section '" + section + "'");
      }
      if (section.rfind("backend.", 0) == 0) {
        auto role = section.substr(8);
        if (role != "default") {
          try {
            role = text::to_lower(to_string(parse_agent_role(role)));
          } catch (const ParseError&) {
            throw ConfigError("unknown config section '" + section + "'");
          }
        }
        backend = &cfg.chat_backends[role];
      } else if (section == "embedder.text") {
        backend = &cfg.text_embedder.emplace();
      } else if (section == "embedder.image") {
        backend = &cfg.image_embedder.emplace();
      } else {
        throw ConfigError("unknown config section '" + section + "'");
      }
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value' (line " + std::to_string(line_no) + ")");
    }
    const auto key = text::trim(std::string_view(line).substr(0, eq));
    const auto value = parse_value(std::string_view(line).substr(eq + 1), line_no);
    const auto full = describe(section, key);
    if (!seen.insert(full).second) throw ConfigError("duplicate config key '" + full + "'");

    if (backend) {
      apply_backend_key(*backend, key, value, section, base_dir);
      continue;
    }
    if (key == "max_iterations") cfg.max_iterations = as_int(value, key);
    else if (key == "confidence_threshold") cfg.confidence_threshold = as_int(value, key);
    else if (key == "max_sub_questions") cfg.max_sub_questions = as_int(value, key);
    else if (key == "k_shot") cfg.k_shot = as_int(value, key);
    else if (key == "rng_seed") cfg.rng_seed = static_cast<std::uint64_t>(expect<std::int64_t>(value, key));
    else if (key == "fixed_iterations") cfg.fixed_iterations = as_int(value, key);
    else if (key == "workers") cfg.workers = as_int(value, key);
    else if (key == "retrieval_top_n") cfg.retrieval_top_n = as_int(value, key);
    else if (key == "retrieval_min_similarity") cfg.retrieval_min_similarity = expect<double>(value, key);
    else if (key == "max_history_chars") {
      auto n = expect<std::int64_t>(value, key);
      if (n < 0) throw ConfigError("config key 'max_history_chars' must be >= 0");
      cfg.max_history_chars = static_cast<std::size_t>(n);
    }
    else if (key == "kg_path") set_path(cfg.kg_path, value, key);
    else if (key == "relation_phrases_path") set_path(cfg.relation_phrases_path, value, key);
    else if (key == "prompts_dir") set_path(cfg.prompts_dir, value, key);
    else if (key == "pool_path") set_path(cfg.pool_path, value, key);
    else if (key == "lexicon_path") set_path(cfg.lexicon_path, value, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "max_iterations = " << c.max_iterations << "\n";
  out << "confidence_threshold = " << c.confidence_threshold << "\n";
  out << "max_sub_questions = " << c.max_sub_questions << "\n";
  out << "k_shot = " << c.k_shot << "\n";
  out << "rng_seed = " << static_cast<std::int64_t>(c.rng_seed) << "\n";
  out << "fixed_iterations = " << c.fixed_iterations << "\n";
  out << "workers = " << c.workers << "\n";
  out << "retrieval_top_n = " << c.retrieval_top_n << "\n";
  out << "retrieval_min_similarity = " << format_double(c.retrieval_min_similarity) << "\n";
  out << "max_history_chars = " << c.max_history_chars << "\n";
  auto opt = [&](const char* key, const std::optional<std::string>& v) {
    if (v) out << key << " = " << quote(*v) << "\n";
  };
  opt("kg_path", c.kg_path);
  opt("relation_phrases_path", c.relation_phrases_path);
  opt("prompts_dir", c.prompts_dir);
  opt("pool_path", c.pool_path);
  opt("lexicon_path", c.lexicon_path);
  for (const auto& [name, b] : c.chat_backends) write_backend(out, "backend." + name, b);
  if (c.text_embedder) write_backend(out, "embedder.text", *c.text_embedder);
  if (c.image_embedder) write_backend(out, "embedder.image", *c.image_embedder);
  return out.str();
}

}  // namespace vqa
