#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"
#include "ufd/corpus.hpp"
#include "ufd/error.hpp"

namespace ufd {
namespace {

using testing::make_dialog;
using testing::TempDir;

const char* kLine1 =
    R"({"id": "d1", "domain": "booking", "turns": [{"speaker": "system", "text": "Hi"}, {"speaker": "user", "text": "Book me"}], "label": 1})";
const char* kLine2 =
    R"({"id": "d2", "domain": "receptionist", "turns": [{"speaker": "system", "text": "Which department?"}, {"speaker": "user", "text": "sales"}, {"speaker": "system", "text": "Transferring."}], "label": null})";
const char* kLine3 =
    R"({"id": "d3", "domain": "other", "turns": [{"speaker": "system", "text": "Hello"}, {"speaker": "user", "text": "no"}, {"speaker": "system", "text": "Sorry?"}, {"speaker": "user", "text": "no!"}], "label": 0})";

TEST(Corpus, LoadsValidLinesInOrder) {
  TempDir dir;
  const auto path = dir.write("c.jsonl", std::string(kLine1) + "\n" + kLine2 + "\n\n" + kLine3 + "\n");
  const auto corpus = load_corpus(path);
  ASSERT_EQ(corpus.size(), 3u);
  EXPECT_EQ(corpus[0].id(), "d1");
  EXPECT_EQ(corpus[1].id(), "d2");
  EXPECT_EQ(corpus[2].id(), "d3");
  EXPECT_EQ(corpus[0].gold_label(), FrustrationLabel::frustrated());
  EXPECT_FALSE(corpus[1].gold_label().has_value());
  EXPECT_EQ(corpus[1].domain(), Domain::kReceptionist);
  EXPECT_EQ(corpus[1].num_pairs(), 1u);
  EXPECT_EQ(corpus[2].num_pairs(), 2u);
  for (const auto& d : corpus)
    for (std::size_t i = 0; i < d.turns().size(); ++i) EXPECT_EQ(d.turns()[i].index, i);
}

TEST(Corpus, RejectsUserFirst) {
  const char* line =
      R"({"id": "x", "domain": "booking", "turns": [{"speaker": "user", "text": "hi"}, {"speaker": "system", "text": "hello"}], "label": 0})";
  try {
    parse_dialog_line(line, 7);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("must start with SYSTEM"), std::string::npos);
    EXPECT_EQ(e.line(), 7u);
  }
}

TEST(Corpus, RejectsBadLabel) {
  const char* line =
      R"({"id": "x", "domain": "booking", "turns": [{"speaker": "system", "text": "hi"}, {"speaker": "user", "text": "yo"}], "label": 2})";
  try {
    parse_dialog_line(line, 1);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("label"), std::string::npos);
  }
}

TEST(Corpus, RejectsOtherInvariantViolations) {
  auto bad = [](const std::string& turns) {
    return R"({"id": "x", "domain": "booking", "turns": )" + turns + R"(, "label": 0})";
  };
  EXPECT_THROW(parse_dialog_line(bad(R"([{"speaker": "system", "text": "hi"}])")), ValidationError);
  EXPECT_THROW(parse_dialog_line(bad(R"([{"speaker": "system", "text": "hi"}, {"speaker": "system", "text": "x"}])")),
               ValidationError);
  EXPECT_THROW(parse_dialog_line(bad(R"([{"speaker": "system", "text": "hi"}, {"speaker": "bot", "text": "x"}])")),
               ValidationError);
  EXPECT_THROW(parse_dialog_line(bad(R"([{"speaker": "system", "text": "hi"}, {"speaker": "user", "text": "  \t"}])")),
               ValidationError);
  EXPECT_THROW(parse_dialog_line(R"({"id": "x", "domain": "mars", "turns": []})"), ValidationError);
}

TEST(Corpus, MalformedJsonReportsLineNumber) {
  try {
    parse_corpus(std::string(kLine1) + "\n{not json\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Corpus, RoundTripPreservesEveryField) {
  std::mt19937_64 rng(11);
  Corpus corpus;
  for (int i = 0; i < 50; ++i) {
    auto d = testing::random_dialog(rng, "r" + std::to_string(i), 1 + static_cast<std::size_t>(i % 5), 0.3,
                                    i % 3 == 0 ? std::nullopt : testing::label(i % 2));
    corpus.push_back(std::move(d));
  }
  corpus.push_back(parse_dialog_line(kLine2));
  corpus.push_back(make_dialog("utf8", {"Grüß dich", "naïve café \"quoted\"\\n"}, std::nullopt, Domain::kOther));
  TempDir dir;
  save_corpus(dir.file("rt.jsonl"), corpus);
  EXPECT_EQ(load_corpus(dir.file("rt.jsonl")), corpus);
}

TEST(FormatHistory, PrefixesEachTurn) {
  EXPECT_EQ(format_history(make_dialog("a", {"Hi", "Book me"})), "SYSTEM: Hi\nUSER: Book me");
  const auto d = make_dialog("b", {"s1", "u1", "s2", "u2"});
  EXPECT_EQ(format_history(d), "SYSTEM: s1\nUSER: u1\nSYSTEM: s2\nUSER: u2");
}

TEST(FormatHistory, LinesRecoverTurnTexts) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const auto d = testing::random_dialog(rng, "h", 1 + static_cast<std::size_t>(i % 6));
    const auto h = format_history(d);
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (true) {
      auto nl = h.find('\n', pos);
      lines.push_back(h.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
    ASSERT_EQ(lines.size(), d.turns().size());
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const std::string prefix = k % 2 == 0 ? "SYSTEM: " : "USER: ";
      ASSERT_EQ(lines[k].rfind(prefix, 0), 0u);
      EXPECT_EQ(lines[k].substr(prefix.size()), d.turns()[k].text);
    }
  }
}

TEST(Redact, ReplacesMatches) {
  const std::vector<std::string> pats = {R"(\d{3}-\d{4})"};
  const auto d = make_dialog("p", {"How can I help?", "call 555-1234"}, testing::label(1));
  const auto r = redact(d, pats);
  EXPECT_EQ(r.turns()[1].text, "call [REDACTED]");
  EXPECT_EQ(r.turns()[0].text, "How can I help?");
  EXPECT_EQ(r.id(), d.id());
  EXPECT_EQ(r.gold_label(), d.gold_label());
}

TEST(Redact, EmptyPatternListIsIdentity) {
  const auto d = make_dialog("p", {"a 555-1234", "b"});
  EXPECT_EQ(redact(d, std::vector<std::string>{}), d);
}

TEST(Redact, ExistingTokenUnchanged) {
  const auto d = make_dialog("p", {"hello", "my number is [REDACTED]"});
  EXPECT_EQ(redact(d, std::vector<std::string>{R"(\d+)"}), d);
  // A pattern that would match inside the token itself leaves it alone.
  EXPECT_EQ(redact(d, std::vector<std::string>{"[A-Z]+"}).turns()[1].text, "my number is [REDACTED]");
}

TEST(Redact, InvalidPatternNamesIt) {
  try {
    Redactor r(std::vector<std::string>{"ok", "(unclosed"});
    FAIL();
  } catch (const PatternError& e) {
    EXPECT_NE(std::string(e.what()).find("(unclosed"), std::string::npos);
  }
}

TEST(Redact, IdempotentAndPreservesStructure) {
  const std::vector<std::string> pats = {R"(\d+)", "[A-Z][a-z]+", "@\\w+", "o+"};
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> digit(0, 9);
  for (int i = 0; i < 100; ++i) {
    auto base = testing::random_dialog(rng, "i" + std::to_string(i), 1 + static_cast<std::size_t>(i % 4), 0.2,
                                       testing::label(i % 2));
    std::vector<std::string> texts;
    for (const auto& t : base.turns()) texts.push_back(t.text + " id " + std::to_string(digit(rng) * 977) + " @Bob");
    const auto d = base.with_texts(texts);
    const auto once = redact(d, pats);
    const auto twice = redact(once, pats);
    EXPECT_EQ(once, twice);
    ASSERT_EQ(once.turns().size(), d.turns().size());
    for (std::size_t k = 0; k < d.turns().size(); ++k) {
      EXPECT_EQ(once.turns()[k].speaker, d.turns()[k].speaker);
      EXPECT_EQ(once.turns()[k].index, d.turns()[k].index);
    }
    EXPECT_EQ(once.id(), d.id());
    EXPECT_EQ(once.domain(), d.domain());
    EXPECT_EQ(once.gold_label(), d.gold_label());
  }
}

TEST(Redact, ZeroLengthMatchesIgnored) {
  EXPECT_EQ(redact(make_dialog("z", {"abc", "xyz"}), std::vector<std::string>{"q*"}).turns()[0].text, "abc");
}

}  // namespace
}  // namespace ufd
