#include <cmath>
#include <sstream>

#include "doctest.h"
#include "support/threads.hpp"
#include "threadmine/candidates.hpp"
#include "threadmine/features.hpp"

using namespace threadmine;
using tmtest::ThreadBuilder;

TEST_SUITE("features") {
  TEST_CASE("component features of an opinion opener") {
    const Thread t = ThreadBuilder("f")
                         .post("p0")
                         .adu("a", ComponentLabel::Claim, "I believe taxes are too high.")
                         .adu("b", ComponentLabel::Premise, "One will struggle with loneliness")
                         .build();
    const auto f = component_feature_names(t.posts[0], 0);
    CHECK(feature_value(f, "first_person") >= 1.0);
    CHECK(feature_value(f, "is_first") == 1.0);
    CHECK(feature_value(f, "fwd=i believe") == 1.0);
    CHECK(feature_value(f, "log_tokens") == doctest::Approx(std::log1p(7.0)));

    const auto g = component_feature_names(t.posts[0], 1);
    CHECK(feature_value(g, "first_person") == 0.0);
    CHECK(feature_value(g, "modal") == 0.0);
    CHECK(feature_value(g, "is_first") == 0.0);
    CHECK(feature_value(g, "is_last") == 1.0);
    CHECK(feature_value(g, "rel_pos") == doctest::Approx(0.5));
  }

  TEST_CASE("empty proposition keeps structural features only") {
    Post p;
    p.id = "p";
    Proposition prop;
    prop.id = "e";
    prop.post_id = "p";
    p.propositions.push_back(prop);
    const auto f = component_feature_names(p, 0);
    CHECK(feature_value(f, "log_tokens") == 0.0);
    for (const auto& x : f) CHECK(x.name.rfind("w=", 0) != 0);
  }

  TEST_CASE("numbers fold and repeated words add up") {
    const Thread t =
        ThreadBuilder("n").post("p0").adu("a", ComponentLabel::Claim, "Buses cost 42 and buses cost 7.").build();
    const auto f = component_feature_names(t.posts[0], 0);
    CHECK(feature_value(f, "w=NUM") == 2.0);
    CHECK(feature_value(f, "w=buses") == 2.0);
  }

  TEST_CASE("overlap and negation") {
    const auto& lex = FeatureLexicons::builtin();
    CHECK(content_overlap("Fares keep rising fast.", "Fares keep rising fast.", lex.stopwords) == 1.0);
    CHECK(content_overlap("Fares rise.", "Buses improve.", lex.stopwords) == 0.0);
    CHECK(content_overlap("", "", lex.stopwords) == 0.0);
    CHECK(has_negation("I don't think so.", lex.negation));
    CHECK(has_negation("I don\xE2\x80\x99t think so.", lex.negation));
    CHECK_FALSE(has_negation("Buses are fine.", lex.negation));
  }

  TEST_CASE("distance buckets") {
    CHECK(distance_bucket(-5) == "<=-2");
    CHECK(distance_bucket(-2) == "<=-2");
    CHECK(distance_bucket(-1) == "-1");
    CHECK(distance_bucket(0) == "0");
    CHECK(distance_bucket(1) == "+1");
    CHECK(distance_bucket(2) == "+2");
    CHECK(distance_bucket(3) == ">=+3");
  }

  TEST_CASE("pair features") {
    const Thread t = ThreadBuilder("q")
                         .post("p0")
                         .adu("c", ComponentLabel::Claim, "Public transit should be free.")
                         .adu("p", ComponentLabel::Premise, "I don't think fares cover costs.")
                         .build();
    const ThreadIndex index(t);
    const auto pairs = enumerate_intra(t, LabelAssignment::gold());
    REQUIRE(pairs.size() == 1);
    const auto f = pair_feature_names(index, pairs[0], std::string("Antithesis"));
    CHECK(feature_value(f, "src_neg") == 1.0);
    CHECK(feature_value(f, "tgt_neg") == 0.0);
    CHECK(feature_value(f, "dist=+1") == 1.0);
    CHECK(feature_value(f, "same_author") == 1.0);
    CHECK(feature_value(f, "rst=Antithesis") == 1.0);
    CHECK(feature_value(f, "src:w=fares") == 1.0);
    // pure function
    const auto again = pair_feature_names(index, pairs[0], std::string("Antithesis"));
    REQUIRE(again.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(again[i].name == f[i].name);
      CHECK(again[i].value == f[i].value);
    }
  }

  TEST_CASE("vocabulary") {
    const std::vector<NamedFeatures> samples{{{"w=a", 1}, {"bias", 1}}, {{"w=a", 2}, {"w=b", 1}}};
    const auto vocab = FeatureVocabulary::build(samples, 2, is_unigram_feature);
    CHECK(vocab.frozen());
    CHECK(vocab.size() == 3);  // oov, bias, w=a
    CHECK(vocab.find("w=b") == std::nullopt);
    const auto x = vocab.encode({{"w=a", 1}, {"w=a", 1}, {"w=b", 3}, {"zero", 0}});
    CHECK(x.get(*vocab.find("w=a")) == 2.0);
    CHECK(x.get(FeatureVocabulary::kOovIndex) == 3.0);
    CHECK(x.vocabulary_id == vocab.id());

    // sample order does not matter
    const auto swapped = FeatureVocabulary::build({samples[1], samples[0]}, 2, is_unigram_feature);
    CHECK(swapped.id() == vocab.id());

    const std::string text = vocab.serialize();
    LineCursor in(text, "vocab");
    const auto back = FeatureVocabulary::parse(in);
    CHECK(back == vocab);
    CHECK(back.id() == vocab.id());

    FeatureVocabulary frozen = vocab;
    CHECK_THROWS(frozen.add("new"));
    FeatureVocabulary open;
    CHECK_THROWS(open.encode({{"x", 1}}));
  }

  TEST_CASE("discourse one-hot") {
    const auto& labels = DiscourseLabelSet::builtin();
    CHECK(labels.size() == 28);
    const auto a = discourse_onehot("Antithesis", labels);
    REQUIRE(a.entries.size() == 1);
    CHECK(a.entries[0].first == *labels.index_of("Antithesis"));
    CHECK(a.entries[0].second == 1.0);
    const auto b = discourse_onehot("Elaboration", labels);
    CHECK(a.entries[0].first != b.entries[0].first);
    set_warnings_enabled(false);
    CHECK(discourse_onehot("NotALabel", labels).entries[0].first == labels.oov_index());
    set_warnings_enabled(true);
    CHECK(DiscourseLabelSet::from_labels({"A", "B", "A"}).size() == 2);
  }

  TEST_CASE("heuristic discourse labels") {
    const auto& rules = DiscourseRules::builtin();
    CHECK(rules.label_for("Fares went up. But buses got better.") == "Antithesis");
    CHECK(rules.label_for("Fares went up. Buses changed.") == "Elaboration");
    CHECK(rules.label_for("There is none to begin with. Life is ultimately meaningless.") == "Evaluation");
  }

  TEST_CASE("discourse label file") {
    std::istringstream ok("t a b Antithesis\nt b a Cause\n");
    const auto m = read_discourse_label_file(ok);
    CHECK(m.size() == 2);
    CHECK(m.at(PairKey{"t", "a", "b"}) == "Antithesis");
    std::istringstream dup("t a b Antithesis\nt a b Cause\n");
    CHECK_THROWS(read_discourse_label_file(dup));
    std::istringstream bad("t a b\n");
    CHECK_THROWS_AS(read_discourse_label_file(bad), ParseError);
  }
}
