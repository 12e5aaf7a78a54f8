#include <sstream>

#include "doctest.h"
#include "support/threads.hpp"
#include "threadmine/distant.hpp"
#include "threadmine/util.hpp"

using namespace threadmine;

namespace {

DumpComment comment(const std::string& id, const std::string& parent, const std::string& body,
                    const std::string& link = "th") {
  DumpComment c;
  c.id = id;
  c.parent_id = parent;
  c.link_id = link;
  c.body = body;
  return c;
}

std::vector<ImhoRecord> imho(const std::string& body) {
  SkipReport skips;
  return extract_imho_records(comment("c", "p", body), {}, skips);
}

}  // namespace

TEST_SUITE("distant") {
  TEST_CASE("dump lines") {
    SkipReport skips;
    auto c = parse_dump_line(
        R"({"id":"t1_x","parent_id":"t3_p","link_id":"t3_p","author":"a","body":"A &amp; B &gt; C &#39;q&#x27;","created_utc":12})",
        skips);
    REQUIRE(c);
    CHECK(c->id == "x");
    CHECK(c->parent_id == "p");
    CHECK(c->body == "A & B > C 'q'");
    CHECK(c->created == 12);
    c = parse_dump_line(R"({"id":"t3_p","title":"T","selftext":"S","created":"77"})", skips);
    REQUIRE(c);
    CHECK(c->link_id == "p");
    CHECK(c->body == "S");
    CHECK(c->created == 77);
    CHECK_FALSE(parse_dump_line("{not json", skips));
    CHECK_FALSE(parse_dump_line("{\"id\":\"a\",\"body\":\"caf\xe9\"}", skips));
    CHECK(skips.counts.at("malformed-line") == 1);
    CHECK(skips.counts.at("invalid-utf8") == 1);
    c = parse_dump_line(R"({"id":"d","body":"[deleted]"})", skips);
    REQUIRE(c);
    CHECK(c->deleted);
  }

  TEST_CASE("entities") {
    CHECK(decode_html_entities("&lt;b&gt; &quot;x&quot; &nbsp;&#8212;&unknown;") ==
          "<b> \"x\" \xC2\xA0\xE2\x80\x94&unknown;");
    CHECK(decode_html_entities("&amp;gt;") == "&gt;");
  }

  TEST_CASE("opinion triggers") {
    CHECK(has_opinion_trigger("IMHO this works"));
    CHECK(has_opinion_trigger("this works, imo."));
    CHECK_FALSE(has_opinion_trigger("animosity and imolation"));
    CHECK_FALSE(has_opinion_trigger("an IMHO-worthy take"));
    CHECK(strip_opinion_trigger("IMHO, cats are great.") == "cats are great.");
    CHECK(strip_opinion_trigger("(IMO) the plan fails.") == "the plan fails.");
    CHECK(strip_opinion_trigger("The plan fails, imo.") == "The plan fails.");
    CHECK(strip_opinion_trigger("It costs more. imo.") == "It costs more.");
  }

  TEST_CASE("imho records") {
    auto r = imho("IMHO, cats are great. They purr.");
    REQUIRE(r.size() == 1);
    CHECK(r[0].claim_sentence == "cats are great.");
    CHECK(r[0].premise_sentence == std::optional<std::string>("They purr."));

    r = imho("That is imho.");
    REQUIRE(r.size() == 1);
    CHECK_FALSE(r[0].premise_sentence);

    r = imho(
        "IMHO, Calorie-counting is a crock what you have to look at is how wholesome are the foods you are "
        "eating. Refined sugar is worse than just empty calories - I believe your body uses a lot of nutrients "
        "up just processing and digesting it.");
    REQUIRE(r.size() == 1);
    CHECK(r[0].claim_sentence.rfind("Calorie-counting is a crock", 0) == 0);
    CHECK(r[0].premise_sentence->rfind("Refined sugar is worse", 0) == 0);

    SkipReport skips;
    const auto kept = extract_imho_records(comment("c", "p", "IMHO, cats rule. Yes."), {false}, skips);
    CHECK(kept[0].claim_sentence == "IMHO, cats rule.");
    CHECK_FALSE(kept[0].acronym_stripped);

    CHECK(imho("IMHO. Then more.").empty());
    CHECK(imho("Nothing here.").empty());
  }

  TEST_CASE("normalization keeps a byte map") {
    const std::string text = "a  \xE2\x80\x9C" "b" "\xE2\x80\x9D\n c";
    const auto n = normalize_for_matching(text, false);
    CHECK(n.text == "a \"b\" c");
    REQUIRE(n.source_begin.size() == n.text.size());
    CHECK(n.source_begin[2] == 3);
    CHECK(n.source_end[2] == 6);
    CHECK(normalize_for_matching(text, true).text == text);
  }

  TEST_CASE("quote response pairs") {
    const std::string parent_body =
        "Cities keep widening highways. Widening roads only invites more cars onto them.";
    const std::vector<DumpComment> posts{
        comment("op", "", parent_body),
        comment("r1", "op", "> Widening roads only invites more cars onto them.\n\nThat is demand. It is fine."),
        comment("r2", "op", "> A sentence the parent never wrote anywhere.\n\nWrong."),
        comment("r3", "gone", "> Some quote that has no parent post.\n\nOrphan."),
    };
    SkipReport skips;
    const auto recs = extract_qr_thread(posts, {}, skips);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].response_sentence == "That is demand.");
    CHECK(recs[0].parent_char_span.start == 31);
    CHECK(recs[0].parent_char_span.end == parent_body.size());
    CHECK_FALSE(recs[0].ambiguous);
    CHECK(verify_qr_record(recs[0], parent_body, false));
    CHECK(skips.counts.at("quote-not-in-parent") == 1);
    CHECK(skips.counts.at("orphan-response") == 1);

    const auto back = parse_qr_json_line(to_json_line(recs[0]));
    CHECK(back == recs[0]);
  }

  TEST_CASE("excluded threads") {
    QrConfig cfg;
    cfg.exclude_thread_ids = {"th"};
    SkipReport skips;
    const std::vector<DumpComment> posts{comment("op", "", "Some parent text that is long enough."),
                                         comment("r", "op", "> Some parent text that is long enough.\n\nNo.")};
    CHECK(extract_qr_thread(posts, cfg, skips).empty());
    CHECK(skips.counts.at("excluded-thread") == 1);
    cfg.exclude_thread_ids.clear();
    CHECK(extract_qr_thread(posts, cfg, skips).size() == 1);
  }

  TEST_CASE("fixture dump against the frozen golden files") {
    for (const auto& [kind, name] : {std::pair{DistantKind::Imho, "imho"}, std::pair{DistantKind::Qr, "qr"}}) {
      BuildDistantOptions opt;
      opt.kind = kind;
      opt.in = tmtest::fixture("distant/dump.jsonl");
      opt.out = std::filesystem::temp_directory_path() / (std::string("tm_unit_") + name + ".jsonl");
      const auto res = build_distant(opt);
      CHECK(read_file(opt.out) == read_file(tmtest::fixture(std::string("distant/golden/") + name + ".jsonl")));
      CHECK(read_file(res.summary_path) ==
            read_file(tmtest::fixture(std::string("distant/golden/") + name + ".jsonl.summary.json")));
    }
  }
}
