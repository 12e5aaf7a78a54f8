#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support/threads.hpp"
#include "threadmine/distant.hpp"
#include "threadmine/salience.hpp"

using namespace threadmine;

namespace {

QrRecord record(const std::string& thread, const std::string& post, std::size_t b, std::size_t e) {
  QrRecord r;
  r.thread_id = thread;
  r.parent_post_id = post;
  r.response_post_id = "resp";
  r.parent_char_span = {b, e};
  return r;
}

std::size_t positives(const std::vector<SalienceExample>& ex) {
  std::size_t n = 0;
  for (const auto& e : ex) n += e.label;
  return n;
}

// Threads of one post each; `target(t, n)` picks the positive sentence.
template <typename Pick>
std::vector<SalienceExample> synthetic(std::size_t threads, std::size_t sentences, Pick target, Rng& rng) {
  std::vector<QrRecord> recs;
  PostTexts posts;
  for (std::size_t t = 0; t < threads; ++t) {
    std::string text;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (std::size_t i = 0; i < sentences; ++i) {
      if (!text.empty()) text += ' ';
      const std::string s = "Sentence number " + std::to_string(i) + " talks about item " +
                            std::to_string(uniform_index(rng, 1000)) + ".";
      spans.push_back({text.size(), text.size() + s.size()});
      text += s;
    }
    const std::string tid = "t" + std::to_string(t), pid = "p" + std::to_string(t);
    posts[pid] = text;
    const auto k = target(t, sentences);
    recs.push_back(record(tid, pid, spans[k].first, spans[k].second));
  }
  SkipReport skips;
  return build_salience_dataset(recs, posts, skips);
}

}  // namespace

TEST_SUITE("salience") {
  const std::string four = "First point here. Second point here. Third point here. Fourth point here.";

  TEST_CASE("one quote covering one sentence") {
    SkipReport skips;
    const auto ex = build_salience_dataset({record("t", "p", 18, 36)}, {{"p", four}}, skips);
    REQUIRE(ex.size() == 4);
    CHECK(positives(ex) == 1);
    CHECK(ex[1].label);
    CHECK(ex[1].text == "Second point here.");
  }

  TEST_CASE("quote across a sentence boundary") {
    SkipReport skips;
    const auto ex = build_salience_dataset({record("t", "p", 25, 45)}, {{"p", four}}, skips);
    CHECK(positives(ex) == 2);
    CHECK(ex[1].label);
    CHECK(ex[2].label);
  }

  TEST_CASE("unresolved posts are counted") {
    SkipReport skips;
    CHECK(build_salience_dataset({record("t", "missing", 0, 5)}, {}, skips).empty());
    CHECK(skips.counts.at("unresolved-post") == 1);
  }

  TEST_CASE("quoted claim of the distant fixture is the positive") {
    std::ifstream in(tmtest::fixture("distant/dump.jsonl"), std::ios::binary);
    SkipReport skips;
    const auto comments = read_dump(in, skips);
    std::vector<QrRecord> recs;
    std::vector<DumpComment> thread;
    for (const auto& c : comments)
      if (c.link_id == "cmv1") thread.push_back(c);
    for (const auto& r : extract_qr_thread(thread, {}, skips))
      if (r.response_post_id == "c1") recs.push_back(r);
    REQUIRE(recs.size() == 1);
    const auto ex = build_salience_dataset(recs, post_texts_from_dump(comments), skips);
    REQUIRE(positives(ex) == 1);
    for (const auto& e : ex)
      if (e.label) CHECK(e.text.rfind("I don't think it's good thing", 0) == 0);
  }

  TEST_CASE("features") {
    const std::vector<std::string> units{"You should act now.", "The sky is blue.", "Grass is green."};
    const auto f = salience_features_for_post(units);
    REQUIRE(f.size() == 3);
    CHECK(feature_value(f[0], "pos=0") == 1.0);
    CHECK(feature_value(f[0], "is_first") == 1.0);
    CHECK(feature_value(f[0], "cue=should") == 1.0);
    CHECK(feature_value(f[0], "second_person") == 1.0);
    CHECK(feature_value(f[2], "rel_pos") == 1.0);
    const auto c = tfidf_centrality({"same words here", "same words here"}, SalienceLexicons::builtin().stopwords);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(tfidf_centrality({"the", "alpha beta"}, SalienceLexicons::builtin().stopwords)[0] == 0.0);
  }

  TEST_CASE("recall curves") {
    Rng rng(1);
    const auto ex = synthetic(20, 6, [](std::size_t t, std::size_t) { return t % 6; }, rng);
    const auto base = position_baseline(ex, 6);
    // targets t % 6 over 20 posts: positions 0..5 hold 4, 4, 3, 3, 3, 3 gold units
    const std::vector<double> expected{20, 40, 55, 70, 85, 100};
    for (std::size_t k = 1; k <= 6; ++k) CHECK(base.at(k) == doctest::Approx(expected[k - 1]));
    for (std::size_t k = 2; k <= 6; ++k) CHECK(base.at(k) >= base.at(k - 1));
    CHECK(base.at(6) == 100.0);
    CHECK(base.max_units == 6);
  }

  TEST_CASE("knee selection") {
    RecallCurve c;
    c.recall = {10, 30, 50, 60, 70, 72, 74, 76, 78, 80};
    CHECK(select_knee(c) == 5);
    c.recall = {10, 20, 30};
    CHECK(select_knee(c) == 1);
  }

  TEST_CASE("first position always quoted") {
    Rng rng(2);
    const auto ex = synthetic(100, 6, [](std::size_t, std::size_t) { return std::size_t{0}; }, rng);
    const auto tr = train_salience(ex, {}, 0.2, 6);
    CHECK(tr.heldout.at(1) == 100.0);
    CHECK(tr.heldout_threads.size() == 20);
  }

  TEST_CASE("random targets track the chance rate") {
    Rng rng(3);
    Rng pick(4);
    const auto ex = synthetic(400, 10, [&](std::size_t, std::size_t n) { return uniform_index(pick, n); }, rng);
    const auto tr = train_salience(ex, {}, 0.5, 10);
    // K/10 in expectation; 200 held-out posts give a standard error near 3.5 points
    CHECK(tr.heldout.at(5) == doctest::Approx(50.0).epsilon(0.25));
    CHECK(tr.heldout.at(10) == 100.0);
  }

  TEST_CASE("model round trip and scorer") {
    Rng rng(5);
    const auto ex = synthetic(40, 5, [](std::size_t t, std::size_t) { return t % 2; }, rng);
    const auto tr = train_salience(ex, {}, 0.1, 5);
    std::ostringstream out;
    write_salience_model(out, tr.model);
    const auto back = read_salience_model(out.str());
    CHECK(back == tr.model);
    const std::vector<std::string> units{"One thing.", "Another thing."};
    CHECK(back.score_units(units) == tr.model.score_units(units));
  }
}
