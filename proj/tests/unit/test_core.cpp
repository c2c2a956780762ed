#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "vqa/core/answers.hpp"
#include "vqa/core/config.hpp"
#include "vqa/core/error.hpp"
#include "vqa/core/history.hpp"
#include "vqa/core/text.hpp"
#include "vqa/core/types.hpp"

using namespace vqa;

TEST(Text, TokenizeStripsEdgePunctuationAndLowercases) {
  EXPECT_EQ(text::tokenize("  Yes, the LEFT-lung (mostly).\n"),
            (std::vector<std::string>{"yes", "the", "left-lung", "mostly"}));
  EXPECT_TRUE(text::tokenize("... , !").empty());
  EXPECT_TRUE(text::tokenize("").empty());
}

TEST(Text, TokenizeMatchesOracleOnRandomInput) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto s = testkit::random_sentence(rng);
    ASSERT_EQ(text::tokenize(s), testkit::oracle_tokens(s)) << s;
  }
}

TEST(Text, SplitLinesDropsCarriageReturns) {
  EXPECT_EQ(text::split_lines("a\r\nb\n\nc"), (std::vector<std::string>{"a", "b", "", "c"}));
}

TEST(Text, CollapseAndTrim) {
  EXPECT_EQ(text::collapse_whitespace("  Lung \t  disease\n"), "Lung disease");
  EXPECT_EQ(text::trim("\t x \n"), "x");
}

TEST(Text, Base64) {
  EXPECT_EQ(text::base64_encode(""), "");
  EXPECT_EQ(text::base64_encode("f"), "Zg==");
  EXPECT_EQ(text::base64_encode("fo"), "Zm8=");
  EXPECT_EQ(text::base64_encode("foobar"), "Zm9vYmFy");
}

TEST(Seeds, DeriveSeedIsOrderIndependentAndStable) {
  EXPECT_EQ(derive_seed(7, "a"), derive_seed(7, "a"));
  EXPECT_NE(derive_seed(7, "a"), derive_seed(7, "b"));
  EXPECT_NE(derive_seed(7, "a"), derive_seed(8, "a"));
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Types, RoleAndKindNames) {
  for (auto r : kAllRoles) EXPECT_EQ(parse_agent_role(to_string(r)), r);
  EXPECT_EQ(parse_agent_role("reasoner"), AgentRole::Reasoner);
  EXPECT_THROW(parse_agent_role("critic"), ParseError);
  EXPECT_EQ(parse_question_kind("yes/no"), QuestionKind::Closed);
  EXPECT_EQ(parse_question_kind("multi_choice"), QuestionKind::MultiChoice);
  EXPECT_EQ(parse_question_kind("open"), QuestionKind::Open);
}

TEST(Types, SampleValidation) {
  Sample s{"s1", ImageRef("x.png"), "Which?", QuestionKind::MultiChoice, "A", {"one"}};
  EXPECT_THROW(s.validate(), DatasetError);
  s.options.push_back("two");
  EXPECT_NO_THROW(s.validate());
  s.kind = QuestionKind::Closed;
  EXPECT_THROW(s.validate(), DatasetError);
  Sample empty{"", ImageRef("x.png"), "q", QuestionKind::Open, {}, {}};
  EXPECT_THROW(empty.validate(), DatasetError);
}

TEST(Types, QuestionWithOptions) {
  Sample s{"s1", ImageRef("x.png"), "Which organ?", QuestionKind::MultiChoice, "B", {"liver", "spleen"}};
  EXPECT_EQ(question_with_options(s), "Which organ?\nOptions: (A) liver (B) spleen");
  s.kind = QuestionKind::Open;
  s.options.clear();
  EXPECT_EQ(question_with_options(s), "Which organ?");
  EXPECT_EQ(option_label(0), "A");
  EXPECT_EQ(option_label(25), "Z");
}

TEST(Types, ImageRefUrls) {
  EXPECT_TRUE(ImageRef("https://x/y.png").is_url());
  EXPECT_TRUE(ImageRef("data:image/png;base64,AAAA").is_url());
  EXPECT_FALSE(ImageRef("images/a.png").is_url());
}

TEST(History, RenderFormat) {
  ReasoningHistory h;
  EXPECT_EQ(h.render(), "");
  h.append({AgentRole::Perceiver, 0, "caption", "A chest X-ray."});
  EXPECT_EQ(h.render(), "[Perceiver | iter 0 | caption]\nA chest X-ray.");
  h.append({AgentRole::Evaluator, 1, "confidence", "Score: 4"});
  EXPECT_EQ(h.render(), "[Perceiver | iter 0 | caption]\nA chest X-ray.\n\n[Evaluator | iter 1 | confidence]\nScore: 4");
}

TEST(History, AppendOnlyPrefixProperty) {
  std::mt19937_64 rng(11);
  ReasoningHistory h;
  std::vector<ReasoningEntry> mirror;
  for (int i = 0; i < 200; ++i) {
    const auto before = h.render();
    ReasoningEntry e{kAllRoles[rng() % std::size(kAllRoles)], static_cast<int>(rng() % 4), "l" + std::to_string(i),
                     testkit::random_sentence(rng)};
    h.append(e);
    mirror.push_back(e);
    ASSERT_EQ(h.size(), mirror.size());
    ASSERT_TRUE(std::equal(h.entries().begin(), h.entries().end(), mirror.begin()));
    const auto after = h.render();
    ASSERT_EQ(after.substr(0, before.size()), before);
    ASSERT_EQ(after, h.render());
  }
}

TEST(Config, ParsesSectionsAndResolvesPaths) {
  const auto cfg = parse_config(R"(# comment
max_iterations = 2
confidence_threshold = 4
retrieval_min_similarity = 0.25
kg_path = "kg.tsv"

[backend.default]
kind = "http"
endpoint = "http://localhost:8000"
model = "gpt-4o"
api_key_env = "OPENAI_API_KEY"

[backend.perceiver]
kind = "scripted"
fixture = "cs.txt"

[embedder.text]
kind = "scripted"
script = "/abs/emb.tsv"
)",
                                "/base");
  EXPECT_EQ(cfg.max_iterations, 2);
  EXPECT_EQ(cfg.confidence_threshold, 4);
  EXPECT_DOUBLE_EQ(cfg.retrieval_min_similarity, 0.25);
  EXPECT_EQ(*cfg.kg_path, "/base/kg.tsv");
  EXPECT_EQ(cfg.backend_for(AgentRole::Perceiver)->script, "/base/cs.txt");
  EXPECT_EQ(cfg.backend_for(AgentRole::Reasoner)->model, "gpt-4o");
  EXPECT_EQ(cfg.text_embedder->script, "/abs/emb.tsv");
  EXPECT_FALSE(cfg.image_embedder);
}

TEST(Config, Defaults) {
  RunConfig c;
  EXPECT_EQ(c.max_iterations, 3);
  EXPECT_EQ(c.confidence_threshold, 3);
  EXPECT_EQ(c.k_shot, 4);
  EXPECT_EQ(c.fixed_iterations, 0);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ErrorsNameTheKey) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("max_iteration = 3").find("max_iteration"), std::string::npos);
  EXPECT_NE(message("confidence_threshold = 9").find("confidence_threshold"), std::string::npos);
  EXPECT_NE(message("k_shot = \"four\"").find("k_shot"), std::string::npos);
  EXPECT_NE(message("k_shot = 1\nk_shot = 2").find("k_shot"), std::string::npos);
  EXPECT_NE(message("[backend.critic]\nkind = \"http\"").find("backend.critic"), std::string::npos);
  EXPECT_NE(message("[backend.reasoner]\nkind = \"http\"").find("backend.reasoner.endpoint"), std::string::npos);
  EXPECT_NE(message("[backend.reasoner]\ntemperature = 0.5").find("temperature"), std::string::npos);
}

TEST(Config, SerializeRoundTrip) {
  RunConfig c;
  c.max_iterations = 5;
  c.rng_seed = 42;
  c.retrieval_min_similarity = 0.1;
  c.kg_path = "/data/kg.tsv";
  BackendSpec http;
  http.kind = BackendSpec::Kind::Http;
  http.endpoint = "http://h:1";
  http.model = "m \"quoted\"";
  c.chat_backends["default"] = http;
  BackendSpec scripted;
  scripted.script = "/t.txt";
  c.chat_backends["reasoner"] = scripted;
  c.text_embedder = scripted;
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Answers, FirstYesNo) {
  EXPECT_EQ(first_yes_no("Yes, the midline of the mediastinum has shifted to the right.", {}), "Yes");
  EXPECT_EQ(first_yes_no("There is no evidence of shift, so yes", {}), "No");
  EXPECT_EQ(first_yes_no("The finding is unclear", {}), std::nullopt);
  EXPECT_EQ(first_yes_no("Nope. Yesterday it was fine.", {}), std::nullopt);
}

TEST(Answers, LexiconExtends) {
  testkit::TempDir dir;
  testkit::write_text(dir.path() / "lex.tsv", "# word\tpolarity\ncorrect\tyes\nabsent\tno\n");
  const auto lex = YesNoLexicon::load(dir.path() / "lex.tsv");
  EXPECT_EQ(first_yes_no("Absent, as expected.", lex), "No");
  EXPECT_EQ(first_yes_no("Correct", lex), "Yes");
  testkit::write_text(dir.path() / "bad.tsv", "maybe\tperhaps\n");
  EXPECT_THROW(YesNoLexicon::load(dir.path() / "bad.tsv"), ParseError);
}

TEST(Answers, FirstOptionLabel) {
  const std::vector<std::string> opts{"atelectasis", "pneumonia", "pleural effusion", "normal"};
  EXPECT_EQ(first_option_label("Answer: (B) pneumonia", opts), "B");
  EXPECT_EQ(first_option_label("Most likely pleural effusion.", opts), "C");
  EXPECT_EQ(first_option_label("pleural thickening only", opts), std::nullopt);
  EXPECT_EQ(first_option_label("E", opts), std::nullopt);
  EXPECT_EQ(normalize_closed_answer("Answer: d", QuestionKind::MultiChoice, opts), "D");
  EXPECT_EQ(normalize_closed_answer("No.", QuestionKind::Closed, {}), "No");
  EXPECT_EQ(normalize_closed_answer("No.", QuestionKind::Open, {}), std::nullopt);
}

TEST(Answers, OptionLabelMatchesOracle) {
  std::mt19937_64 rng(5);
  const std::vector<std::vector<std::string>> option_sets{
      {"liver", "spleen"}, {"left lung", "right lung", "heart"}, {"yes", "no", "normal", "mass"}};
  for (int i = 0; i < 3000; ++i) {
    const auto& opts = option_sets[i % option_sets.size()];
    const auto s = testkit::random_sentence(rng);
    ASSERT_EQ(first_option_label(s, opts), testkit::oracle_option(s, opts)) << s;
  }
}
