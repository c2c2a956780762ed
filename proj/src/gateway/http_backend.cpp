#include "vqa/gateway/http.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::gateway {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_endpoint(const std::string& endpoint, const std::string& default_path) {
  auto scheme = endpoint.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint '" + endpoint + "' lacks a scheme");
  auto slash = endpoint.find('/', scheme + 3);
  SplitUrl out;
  out.origin = endpoint.substr(0, slash);
  std::string path = slash == std::string::npos ? "" : endpoint.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
  if (path.size() >= default_path.size() &&
      path.compare(path.size() - default_path.size(), default_path.size(), default_path) == 0) {
    out.path = path;
  } else if (path.empty()) {
    out.path = "/v1" + default_path;
  } else {
    out.path = path + default_path;
  }
  return out;
}

std::string mime_for(const std::string& path) {
  auto ext = text::to_lower(std::filesystem::path(path).extension().string());
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  return "application/octet-stream";
}

bool retriable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

std::string image_to_url(const ImageRef& image) {
  if (image.is_url()) return image.str();
  std::ifstream in(image.str(), std::ios::binary);
  if (!in) throw BackendError("cannot read image '" + image.str() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return "data:" + mime_for(image.str()) + ";base64," + text::base64_encode(buf.str());
}

nlohmann::json build_chat_body(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    nlohmann::json msg = {{"role", m.role == MessageRole::System ? "system" : "user"}};
    if (m.image) {
      msg["content"] = nlohmann::json::array(
          {{{"type", "text"}, {"text", m.text}},
           {{"type", "image_url"}, {"image_url", {{"url", image_to_url(*m.image)}}}}});
    } else {
      msg["content"] = m.text;
    }
    messages.push_back(std::move(msg));
  }
  return {{"model", request.model_id},
          {"messages", std::move(messages)},
          {"temperature", request.temperature},
          {"max_tokens", request.max_tokens},
          {"stream", false}};
}

std::string parse_chat_response(const std::string& body) {
  auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw BackendError("endpoint returned non-JSON body");
  try {
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    // Some servers return a list of content parts.
    std::string out;
    for (const auto& part : content) {
      if (part.value("type", "") == "text") out += part.value("text", "");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed chat completion response: ") + e.what());
  }
}

std::string post_json_with_retry(const HttpOptions& options, const std::string& default_path,
                                 const nlohmann::json& body) {
  if (options.offline) {
    throw OfflineError("network call to '" + options.endpoint + "' refused in offline mode");
  }
  const auto url = split_endpoint(options.endpoint, default_path);
  httplib::Client client(url.origin);
  client.set_connection_timeout(options.timeout_s, 0);
  client.set_read_timeout(options.timeout_s, 0);
  client.set_write_timeout(options.timeout_s, 0);
  httplib::Headers headers;
  if (!options.api_key.empty()) headers.emplace("Authorization", "Bearer " + options.api_key);
  const auto payload = body.dump();

  auto backoff = options.retry.initial_backoff;
  std::string last_error;
  const int attempts = std::max(1, options.retry.attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    count_network_call();
    auto res = client.Post(url.path, headers, payload, "application/json");
    if (res && res->status >= 200 && res->status < 300) return res->body;
    if (res && !retriable_status(res->status)) {
      throw BackendError("endpoint returned HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 200));
    }
    last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw NetworkError("request to '" + options.endpoint + "' failed after " +
                     std::to_string(attempts) + " attempts: " + last_error);
}

HttpChatBackend::HttpChatBackend(HttpOptions options) : options_(std::move(options)) {}

Completion HttpChatBackend::complete(AgentRole, const ChatRequest& request) {
  request.validate();
  ChatRequest wire = request;
  if (wire.model_id.empty()) wire.model_id = options_.model;
  const auto body = post_json_with_retry(options_, "/chat/completions", build_chat_body(wire));
  return {parse_chat_response(body), false};
}

HttpEmbeddingProvider::HttpEmbeddingProvider(HttpOptions options) : options_(std::move(options)) {}

EmbeddingVector HttpEmbeddingProvider::post(const std::string& input) {
  const auto body = post_json_with_retry(options_, "/embeddings",
                                         {{"model", options_.model}, {"input", input}});
  auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw BackendError("embedding endpoint returned non-JSON body");
  try {
    EmbeddingVector v{doc.at("data").at(0).at("embedding").get<std::vector<double>>()};
    if (v.values.empty()) throw BackendError("embedding endpoint returned an empty vector");
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed embedding response: ") + e.what());
  }
}

EmbeddingResult HttpEmbeddingProvider::embed_text(const std::string& text) {
  if (text.empty()) throw BackendError("cannot embed empty text");
  return {post(text), false};
}

EmbeddingResult HttpEmbeddingProvider::embed_image(const ImageRef& image) {
  return {post(image_to_url(image)), false};
}

}  // namespace vqa::gateway
