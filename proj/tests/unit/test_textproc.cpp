#include "doctest.h"
#include "threadmine/textproc.hpp"

using namespace threadmine;

TEST_SUITE("textproc") {
  TEST_CASE("two short sentences") {
    const auto spans = segment_sentences("I agree. But no.");
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].start == 0);
    CHECK(spans[0].end == 8);
    CHECK(spans[1].start == 9);
    CHECK(spans[1].index == 1);
  }

  TEST_CASE("abbreviation does not end a sentence") {
    CHECK(segment_sentences("This helps, e.g. students abroad.").size() == 1);
  }

  TEST_CASE("calorie example splits in two") {
    const auto s = sentence_texts(
        "Calorie-counting is a crock what you have to look at is how wholesome are the foods you are eating. "
        "Refined sugar is worse than just empty calories - I believe your body uses a lot of nutrients up just "
        "processing and digesting it.");
    REQUIRE(s.size() == 2);
    CHECK(s[1].rfind("Refined sugar", 0) == 0);
  }

  TEST_CASE("lowercase continuation and blank lines") {
    CHECK(sentence_texts("Fine. and then more.").size() == 1);
    CHECK(sentence_texts("no period here\n\nnext block").size() == 2);
    CHECK(sentence_texts("").empty());
    CHECK(sentence_texts("   \n ").empty());
  }

  TEST_CASE("spans cover all non-space text in order") {
    const std::string text = "One. Two!  Three? \"Four.\" 5 is a number.";
    const auto spans = segment_sentences(text);
    std::size_t prev = 0;
    std::string joined;
    for (const auto& sp : spans) {
      CHECK(sp.start >= prev);
      CHECK(sp.end > sp.start);
      prev = sp.end;
      for (char c : text.substr(sp.start, sp.end - sp.start))
        if (c != ' ') joined += c;
    }
    std::string all;
    for (char c : text)
      if (c != ' ') all += c;
    CHECK(joined == all);
  }

  TEST_CASE("tokenize") {
    CHECK(tokenize("I don't know.") == std::vector<std::string>{"i", "don", "'", "t", "know", "."});
    CHECK(tokenize("").empty());
    CHECK(tokenize("Good arguments.") == std::vector<std::string>{"good", "arguments", "."});
    CHECK(tokenize("it\xE2\x80\x99s") == std::vector<std::string>{"it", "'", "s"});
  }

  TEST_CASE("blockquotes") {
    auto q = extract_blockquotes("> claim text\nMy rebuttal here.");
    REQUIRE(q.size() == 1);
    CHECK(q[0].quote_text == "claim text");
    CHECK(q[0].tail_text == "My rebuttal here.");
    CHECK_FALSE(q[0].nested);

    CHECK(extract_blockquotes("no quotes at all\nnone here").empty());

    q = extract_blockquotes("> first\n> continued\n\nreply one\n> second\nreply two");
    REQUIRE(q.size() == 2);
    CHECK(q[0].quote_text == "first continued");
    CHECK(q[0].tail_text == "reply one");
    CHECK(q[1].quote_text == "second");
    CHECK(q[1].tail_text == "reply two");

    q = extract_blockquotes(">> deeper\nok");
    REQUIRE(q.size() == 1);
    CHECK(q[0].nested);

    CHECK(extract_blockquotes("```\n> in code\n```\ntext").empty());
  }

  TEST_CASE("lexicon phrases") {
    const Lexicon lex = Lexicon::parse("# comment\ni don't think\nshould\n");
    CHECK(lex.size() == 2);
    CHECK(lex.count_matches(tokenize("I don't think you should.")) == 2);
    CHECK(lex.contains("should"));
    CHECK_FALSE(lex.contains("would"));
  }
}
