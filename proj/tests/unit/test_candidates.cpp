#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support/threads.hpp"
#include "threadmine/candidates.hpp"

using namespace threadmine;
using tmtest::ThreadBuilder;

namespace {

std::set<std::pair<std::string, std::string>> edges(const std::vector<CandidatePair>& pairs) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& p : pairs) out.insert({p.source_id, p.target_id});
  return out;
}

CandidatePair inter(const std::string& s, const std::string& t, const std::string& tpost) {
  CandidatePair p;
  p.thread_id = "x";
  p.source_id = s;
  p.target_id = t;
  p.target_post_id = tpost;
  p.kind = RelationKind::InterTurn;
  return p;
}

CandidatePair at_distance(int d, const std::string& id) {
  CandidatePair p;
  p.thread_id = "x";
  p.source_id = id;
  p.target_id = "t";
  p.sentence_distance = d;
  return p;
}

}  // namespace

TEST_SUITE("candidates") {
  TEST_CASE("intra pairs in one post") {
    const Thread t = ThreadBuilder("i")
                         .post("p0")
                         .adu("C0", ComponentLabel::Claim)
                         .adu("P1", ComponentLabel::Premise)
                         .adu("P2", ComponentLabel::Premise)
                         .build();
    const auto pairs = enumerate_intra(t, LabelAssignment::gold());
    CHECK(edges(pairs) == std::set<std::pair<std::string, std::string>>{
                              {"P1", "C0"}, {"P1", "P2"}, {"P2", "C0"}, {"P2", "P1"}});
    CHECK(pairs[0].sentence_distance == 1);

    const Thread claims =
        ThreadBuilder("c").post("p0").adu("a", ComponentLabel::Claim).adu("b", ComponentLabel::Claim).build();
    CHECK(enumerate_intra(claims, LabelAssignment::gold()).empty());
  }

  TEST_CASE("inter pairs") {
    const Thread t = ThreadBuilder("j")
                         .post("p0")
                         .adu("c", ComponentLabel::Claim)
                         .adu("p", ComponentLabel::Premise)
                         .post("p1", "p0")
                         .adu("r", ComponentLabel::Claim)
                         .post("p2", "p0")
                         .adu("n", ComponentLabel::NonArgument)
                         .build();
    CHECK(enumerate_inter(t, LabelAssignment::gold()).size() == 2);

    const Thread two_hops = ThreadBuilder("k")
                                .post("p0")
                                .adu("c", ComponentLabel::Claim)
                                .post("p1", "p0")
                                .adu("r", ComponentLabel::Claim)
                                .post("p2", "p1")
                                .adu("s", ComponentLabel::Claim)
                                .build();
    CHECK(enumerate_inter(two_hops, LabelAssignment::gold()).size() == 2);
    CHECK(enumerate_inter(two_hops, LabelAssignment::gold(), InterScope::Ancestors).size() == 3);
  }

  TEST_CASE("global stability pairs") {
    const Thread t = load_corpus(tmtest::fixture("global_stability.thread")).at(0);
    const auto pairs = enumerate_inter(t, LabelAssignment::gold());
    CHECK(pairs.size() == 6);
    CHECK(std::count_if(pairs.begin(), pairs.end(), [](const CandidatePair& p) { return *p.gold; }) == 3);
  }

  TEST_CASE("predicted labels drive enumeration but titles stay main claims") {
    const Thread t = ThreadBuilder("l")
                         .post("p0")
                         .title("mc", "CMV: something")
                         .adu("a", ComponentLabel::Claim)
                         .adu("b", ComponentLabel::NonArgument)
                         .build();
    PredictedLabels pred;
    pred["l"]["a"] = ComponentLabel::Premise;
    pred["l"]["b"] = ComponentLabel::Premise;
    pred["l"]["mc"] = ComponentLabel::NonArgument;
    const auto pairs = enumerate_intra(t, LabelAssignment::predicted(pred));
    // two premises and the main claim: 2 * (1 + 2 - 1)
    CHECK(pairs.size() == 4);
  }

  TEST_CASE("window") {
    const std::vector<CandidatePair> pairs{at_distance(1, "a"), at_distance(3, "b"), at_distance(-2, "c")};
    auto r = apply_window(pairs, 0, 1);
    REQUIRE(r.kept.size() == 1);
    CHECK(r.kept[0].source_id == "a");
    CHECK(r.removed.size() == 2);
    CHECK(r.removed[0].filters_applied.back() == window_filter_name(0, 1));

    const std::vector<CandidatePair> inside{at_distance(0, "a"), at_distance(5, "b")};
    CHECK(apply_window(inside, 0, 5).kept.size() == 2);
    CHECK_THROWS(apply_window({inter("a", "b", "p")}, 0, 1));
  }

  TEST_CASE("window composition") {
    Rng rng(5);
    std::vector<CandidatePair> pairs;
    for (int i = 0; i < 60; ++i)
      pairs.push_back(at_distance(static_cast<int>(uniform_index(rng, 17)) - 8, "s" + std::to_string(i)));
    for (int trial = 0; trial < 30; ++trial) {
      const int lo1 = static_cast<int>(uniform_index(rng, 9)) - 6, hi1 = lo1 + static_cast<int>(uniform_index(rng, 8));
      const int lo2 = static_cast<int>(uniform_index(rng, 9)) - 6, hi2 = lo2 + static_cast<int>(uniform_index(rng, 8));
      const auto twice = apply_window(apply_window(pairs, lo1, hi1).kept, lo2, hi2).kept;
      const auto once = apply_window(pairs, std::max(lo1, lo2), std::min(hi1, hi2)).kept;
      CHECK(edges(twice) == edges(once));
    }
  }

  TEST_CASE("target selection") {
    const Thread t = ThreadBuilder("s")
                         .post("p0")
                         .adu("a", ComponentLabel::Claim)
                         .adu("b", ComponentLabel::Premise)
                         .adu("c", ComponentLabel::Claim)
                         .build();
    const Post& post = t.posts[0];
    auto sel = select_targets(t, post, constant_scorer(), 2);
    CHECK(sel.selected_ids == std::vector<std::string>{"a", "b"});
    CHECK(select_targets(t, post, constant_scorer(), 10).selected_ids.size() == 3);

    SalienceScorer last_best = [](const Thread&, const Post& p) {
      std::vector<double> s;
      for (std::size_t i = 0; i < p.propositions.size(); ++i) s.push_back(static_cast<double>(i));
      return s;
    };
    CHECK(select_targets(t, post, last_best, 1).selected_ids == std::vector<std::string>{"c"});

    const Thread same = ThreadBuilder("g")
                            .post("p0")
                            .adu("a", ComponentLabel::Claim)
                            .adu("b", ComponentLabel::Premise, "", true)
                            .adu("c", ComponentLabel::Claim)
                            .build();
    sel = select_targets(same, same.posts[0], constant_scorer(), 1, SelectionGranularity::Sentence);
    CHECK(sel.selected_ids.size() == 2);
  }

  TEST_CASE("constraint on three components") {
    const SelectionMap sel{{"pb", {"pb", {"B"}, 1}}, {"pc", {"pc", {"C", "MC"}, 2}}};
    // A->B, B->C: B is a target, so B->C goes
    auto r = apply_target_constraints({inter("A", "B", "pb"), inter("B", "C", "pc")}, sel, std::string("MC"));
    CHECK(edges(r.kept) == std::set<std::pair<std::string, std::string>>{{"A", "B"}});
    REQUIRE(r.removed.size() == 1);
    CHECK(r.removed[0].filters_applied.back() == kSourceTargetFilter);
    // A->B, B->MC: both stay
    r = apply_target_constraints({inter("A", "B", "pb"), inter("B", "MC", "pc")}, sel, std::string("MC"));
    CHECK(r.kept.size() == 2);
    // unselected target
    r = apply_target_constraints({inter("A", "X", "pb")}, sel, std::string("MC"));
    CHECK(r.kept.empty());
    CHECK(r.removed[0].filters_applied.back() == kTargetSelectionFilter);
    // posts without a selection entry are untouched
    r = apply_target_selection({inter("A", "Q", "pq")}, sel);
    CHECK(r.kept.size() == 1);
  }

  TEST_CASE("pair file round trip") {
    const Thread t = load_corpus(tmtest::fixture("global_stability.thread")).at(0);
    const auto pairs = enumerate_inter(t, LabelAssignment::gold());
    std::stringstream ss;
    write_pair_file(ss, pairs);
    const auto back = read_pair_file(ss);
    REQUIRE(back.size() == pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      CHECK(back[i].key() == pairs[i].key());
      CHECK(back[i].gold == pairs[i].gold);
    }
  }
}
