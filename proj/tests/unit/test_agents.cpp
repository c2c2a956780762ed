#include <gtest/gtest.h>

#include <random>

#include "golden_fixtures.hpp"
#include "test_support.hpp"
#include "vqa/agents/agents.hpp"
#include "vqa/agents/prompts.hpp"
#include "vqa/core/error.hpp"
#include "vqa/gateway/scripted.hpp"

using namespace vqa;
using namespace vqa::agents;

namespace {

using testkit::golden;

ReasonInputs reason_inputs(const testkit::GoldenFixture& f, QuestionKind kind) {
  return {kind, f.question, {}, f.caption, f.initial, f.history, f.rag, f.icl};
}

}  // namespace

TEST(Prompts, BuiltinLibraryIsComplete) {
  const auto lib = PromptLibrary::builtin();
  EXPECT_EQ(lib.caption_prompts().size(), 16u);
  EXPECT_EQ(lib.caption_prompts().front(), "Describe the following image in detail");
  EXPECT_EQ(lib.caption_prompts().back(), "Write an exhaustive depiction of the given image");
  for (const auto& name : PromptLibrary::template_names()) EXPECT_NO_THROW(lib.get(name)) << name;
  EXPECT_EQ(lib.get("explorer_system").placeholders(), std::set<std::string>{"max_sub_questions"});
  EXPECT_EQ(lib.get("reasoner_closed_user").placeholders(),
            (std::set<std::string>{"caption", "question", "initial_answer", "history", "rag_context"}));
}

TEST(Prompts, RenderSubstitutesOncePerPass) {
  PromptTemplate t("t", "A {x} and {y} and {x}. {not a placeholder} {}");
  EXPECT_EQ(t.placeholders(), (std::set<std::string>{"x", "y"}));
  EXPECT_EQ(t.render({{"x", "{y}"}, {"y", "2"}, {"unused", "z"}}), "A {y} and 2 and {y}. {not a placeholder} {}");
  EXPECT_THROW(t.render({{"x", "1"}}), ConfigError);
}

TEST(Prompts, RenderMatchesNaiveOracle) {
  std::mt19937_64 rng(17);
  const std::vector<std::string> names{"a", "b", "c_d"};
  for (int i = 0; i < 500; ++i) {
    std::string body, expected;
    Bindings b;
    for (const auto& n : names) b[n] = testkit::random_sentence(rng, 3) + (rng() % 3 == 0 ? "{a}" : "");
    const int pieces = static_cast<int>(rng() % 8);
    for (int p = 0; p < pieces; ++p) {
      if (rng() % 2) {
        const auto& n = names[rng() % names.size()];
        body += "{" + n + "}";
        expected += b[n];
      } else {
        auto lit = testkit::random_sentence(rng, 3);
        body += lit;
        expected += lit;
      }
    }
    ASSERT_EQ(PromptTemplate("p", body).render(b), expected) << body;
  }
}

TEST(Prompts, DirectoryOverridesBuiltins) {
  testkit::TempDir dir;
  testkit::write_text(dir.path() / "evaluator_user.txt", "Q={question}\n");
  const auto lib = PromptLibrary::load(dir.path());
  EXPECT_EQ(lib.get("evaluator_user").body(), "Q={question}");
  EXPECT_EQ(lib.get("explorer_user").body(), PromptLibrary::builtin().get("explorer_user").body());
  EXPECT_THROW(lib.get("nonexistent"), ConfigError);
}

TEST(Golden, RenderedPromptsMatchByteForByte) {
  const auto lib = PromptLibrary::builtin();
  for (const auto& f : testkit::golden_fixtures()) {
    SCOPED_TRACE(f.name);
    EXPECT_EQ(testkit::render_request(caption_request(lib, ImageRef(f.image), f.caption_prompt)), golden("perceiver." + f.name));
    EXPECT_EQ(testkit::render_request(explorer_request(lib, f.question, f.caption, f.history, f.max_sub_questions)),
              golden("explorer." + f.name));
    EXPECT_EQ(testkit::render_request(reasoner_request(lib, reason_inputs(f, QuestionKind::Open))),
              golden("reasoner_open." + f.name));
    EXPECT_EQ(testkit::render_request(reasoner_request(lib, reason_inputs(f, QuestionKind::Closed))),
              golden("reasoner_closed." + f.name));
    EXPECT_EQ(testkit::render_request(evaluator_request(lib, {f.question, f.caption, f.answer, f.history, f.icl})),
              golden("evaluator." + f.name));
  }
}

TEST(Perceiver, CaptionIndexFromSeed) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto i = caption_prompt_index(s, 16);
    EXPECT_LT(i, 16u);
    EXPECT_EQ(i, splitmix64(s) % 16);
  }
}

TEST(Perceiver, PassesResponsesThrough) {
  gateway::ScriptedChatBackend mllm(gateway::parse_transcript(
      "=== Perceiver\nA chest X-ray.\n=== Perceiver\n?? Has the midline\nYes, shifted right.\n"));
  const auto p = perceive(mllm, PromptLibrary::builtin(), ImageRef("x.png"),
                          "Has the midline of the mediastinum shifted?", 5);
  EXPECT_EQ(p.caption, "A chest X-ray.");
  EXPECT_EQ(p.initial_answer, "Yes, shifted right.");
  EXPECT_EQ(p.caption_prompt_index, caption_prompt_index(5, 16));
}

TEST(Explorer, ParsesCaseStudyDecomposition) {
  const auto qs = parse_sub_questions(
      "Sub-question 1: Are there any visible signs of mediastinal shift, such as displacement of the trachea or heart?\n"
      "Sub-question 2: Is the position of the heart and trachea symmetrical and centered within the thoracic cavity?\n"
      "Sub-question 3: Are there any abnormalities in the lung volumes or pleural spaces that could contribute to a "
      "shift in the mediastinum?\n",
      3);
  ASSERT_EQ(qs.size(), 3u);
  EXPECT_EQ(qs[0].rfind("Are there any visible signs of mediastinal shift", 0), 0u);
}

TEST(Explorer, ToleratesFormattingAndTruncates) {
  const auto qs = parse_sub_questions(
      "Here you go:\n- **Sub-question 1:** A?\n* sub-question 2 : B?\nSUB-QUESTION 3: C?\nSub-question 4: D?\n"
      "Sub-question 5: E?\n",
      3);
  EXPECT_EQ(qs, (std::vector<std::string>{"A?", "B?", "C?"}));
  EXPECT_TRUE(parse_sub_questions("No questions here.", 3).empty());
}

TEST(Explorer, AssignsLevelsByPosition) {
  testkit::FnChat llm([](AgentRole, const gateway::ChatRequest&) {
    return "Sub-question 1: a?\nSub-question 2: b?\nSub-question 3: c?";
  });
  testkit::FnChat mllm([](AgentRole role, const gateway::ChatRequest& r) {
    EXPECT_EQ(role, AgentRole::Explorer);
    EXPECT_TRUE(r.messages.front().image);
    return " answer to " + r.messages.front().text + " ";
  });
  const auto out = explore(llm, mllm, PromptLibrary::builtin(), ImageRef("x.png"), "q", "c", "h", 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].level, SubQuestionLevel::GeneralObservation);
  EXPECT_EQ(out[1].level, SubQuestionLevel::AnatomicalAnalysis);
  EXPECT_EQ(out[2].level, SubQuestionLevel::DetailedFinding);
  EXPECT_EQ(out[2].answer, "answer to c?");
  testkit::FnChat empty([](AgentRole, const gateway::ChatRequest&) { return "I cannot help."; });
  EXPECT_THROW(explore(empty, mllm, PromptLibrary::builtin(), ImageRef("x.png"), "q", "c", "h", 3),
               EmptyDecompositionError);
}

TEST(Reasoner, ParsesCaseStudyAnswer) {
  const auto r = parse_reasoned_answer("Analysis: X.\n\nAnswer: No, the midline of the mediastinum has not shifted.",
                                       QuestionKind::Closed, {});
  EXPECT_EQ(r.analysis, "X.");
  EXPECT_EQ(r.answer, "No, the midline of the mediastinum has not shifted.");
  EXPECT_EQ(r.normalized, "No");
}

TEST(Reasoner, DegenerateAndMultiChoice) {
  const auto bare = parse_reasoned_answer("Answer: Yes", QuestionKind::Closed, {});
  EXPECT_EQ(bare.analysis, "");
  EXPECT_EQ(bare.normalized, "Yes");
  const auto mc = parse_reasoned_answer("Analysis: hm\nAnswer: (B) pneumonia", QuestionKind::MultiChoice,
                                        {"atelectasis", "pneumonia", "effusion", "normal"});
  EXPECT_EQ(mc.normalized, "B");
  const auto last = parse_reasoned_answer("**Analysis:** the draft Answer: was wrong.\nAnswer: No\n**Answer:** Yes",
                                          QuestionKind::Closed, {});
  EXPECT_EQ(last.answer, "Yes");
  EXPECT_EQ(last.analysis, "the draft Answer: was wrong.\nAnswer: No");
  const auto open = parse_reasoned_answer("Analysis: a\nAnswer: Left lung.", QuestionKind::Open, {});
  EXPECT_EQ(open.normalized, std::nullopt);
  EXPECT_THROW(parse_reasoned_answer("I think yes.", QuestionKind::Closed, {}), AnswerFormatError);
  EXPECT_THROW(parse_reasoned_answer("Analysis: a\nAnswer:   ", QuestionKind::Closed, {}), AnswerFormatError);
}

TEST(Reasoner, FormatParseRoundTrip) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 2000; ++i) {
    const auto analysis = text::trim(testkit::random_sentence(rng));
    const auto answer = text::trim(testkit::random_sentence(rng));
    if (answer.empty()) continue;
    const auto parsed = parse_reasoned_answer(format_reasoned_answer(analysis, answer), QuestionKind::Closed, {});
    ASSERT_EQ(parsed.analysis, analysis);
    ASSERT_EQ(parsed.answer, answer);
    ASSERT_EQ(parsed.normalized, normalize_closed_answer(answer, QuestionKind::Closed, {}));
  }
}

TEST(Reasoner, IclBlockIsAppended) {
  ReasonInputs in{QuestionKind::Closed, "q", {}, "c", "a0", "h", "", "Example 1:\nx"};
  const auto req = reasoner_request(PromptLibrary::builtin(), in);
  const auto& user = req.messages.back().text;
  EXPECT_EQ(user.substr(user.size() - std::string("\n\nSimilar examples:\nExample 1:\nx").size()),
            "\n\nSimilar examples:\nExample 1:\nx");
  EXPECT_EQ(with_examples("p", ""), "p");
}

TEST(Evaluator, ParsesScores) {
  EXPECT_EQ(parse_confidence("Score: 4\nExplanation: consistent with sub-answers"),
            (Confidence{4, "consistent with sub-answers"}));
  EXPECT_EQ(parse_confidence("Score: 1\nExplanation: contradicted"), (Confidence{1, "contradicted"}));
  EXPECT_EQ(parse_confidence("Confident Score : 4").score, 4);
  EXPECT_EQ(parse_confidence("**Score:** 5\n**Explanation:** fine").explanation, "fine");
  EXPECT_THROW(parse_confidence("Score: 7"), ScoreFormatError);
  EXPECT_THROW(parse_confidence("Score: 0"), ScoreFormatError);
  EXPECT_THROW(parse_confidence("I am fairly sure."), ScoreFormatError);
  try {
    parse_confidence("Score: high");
    FAIL();
  } catch (const ScoreFormatError& e) {
    EXPECT_EQ(e.raw(), "Score: high");
  }
}
