#include "vqa/agents/agents.hpp"

#include "vqa/core/error.hpp"
#include "vqa/core/text.hpp"

namespace vqa::agents {

using gateway::ChatMessage;
using gateway::MessageRole;

std::size_t caption_prompt_index(std::uint64_t seed, std::size_t count) {
  if (count == 0) throw ConfigError("no caption prompts available");
  return static_cast<std::size_t>(splitmix64(seed) % count);
}

ChatRequest caption_request(const PromptLibrary& prompts, const ImageRef& image,
                            std::size_t prompt_index) {
  const auto& captions = prompts.caption_prompts();
  ChatRequest req;
  req.messages.push_back(ChatMessage{MessageRole::User, captions.at(prompt_index), image});
  return req;
}

ChatRequest direct_answer_request(const ImageRef& image, const std::string& question) {
  ChatRequest req;
  req.messages.push_back(ChatMessage{MessageRole::User, question, image});
  return req;
}

std::string describe_image(ChatBackend& mllm, const PromptLibrary& prompts, const ImageRef& image,
                           std::uint64_t seed) {
  const auto index = caption_prompt_index(seed, prompts.caption_prompts().size());
  return text::trim(mllm.complete(AgentRole::Perceiver, caption_request(prompts, image, index)).text);
}

Perception perceive(ChatBackend& mllm, const PromptLibrary& prompts, const ImageRef& image,
                    const std::string& question, std::uint64_t seed) {
  Perception out;
  out.caption_prompt_index = caption_prompt_index(seed, prompts.caption_prompts().size());
  out.caption = text::trim(
      mllm.complete(AgentRole::Perceiver, caption_request(prompts, image, out.caption_prompt_index)).text);
  out.initial_answer =
      text::trim(mllm.complete(AgentRole::Perceiver, direct_answer_request(image, question)).text);
  return out;
}

std::string with_examples(std::string user_prompt, const std::string& icl_block) {
  if (icl_block.empty()) return user_prompt;
  return user_prompt + "\n\nSimilar examples:\n" + icl_block;
}

}  // namespace vqa::agents
