#pragma once

#include <optional>
#include <string>
#include <vector>

#include "threadmine/corpus.hpp"
#include "threadmine/util.hpp"

namespace tmtest {

using namespace threadmine;

#ifdef THREADMINE_FIXTURES
inline std::string fixture(const std::string& rel) { return std::string(THREADMINE_FIXTURES) + "/" + rel; }
#endif

// Builds threads proposition by proposition. Each body proposition is its own
// sentence unless `same_sentence` is set; a title proposition is sentence 0
// and the body then starts at sentence 1.
class ThreadBuilder {
 public:
  explicit ThreadBuilder(std::string id) { thread_.id = std::move(id); }

  ThreadBuilder& post(const std::string& id, std::optional<std::string> parent = std::nullopt,
                      const std::string& author = "") {
    Post p;
    p.id = id;
    p.parent_id = std::move(parent);
    p.author = author.empty() ? "a_" + id : author;
    thread_.posts.push_back(std::move(p));
    next_sentence_ = 0;
    return *this;
  }

  ThreadBuilder& title(const std::string& id, const std::string& text) {
    Post& p = thread_.posts.back();
    p.title = text;
    Proposition prop;
    prop.id = id;
    prop.post_id = p.id;
    prop.sentence_index = 0;
    prop.span = {0, text.size()};
    prop.text = text;
    prop.label = ComponentLabel::MainClaim;
    prop.in_title = true;
    p.propositions.insert(p.propositions.begin(), prop);
    next_sentence_ = std::max<std::size_t>(next_sentence_, 1);
    return *this;
  }

  ThreadBuilder& adu(const std::string& id, ComponentLabel label, std::string text = "",
                     bool same_sentence = false) {
    Post& p = thread_.posts.back();
    if (text.empty()) text = "Statement " + id + " holds.";
    if (!p.text.empty()) p.text += ' ';
    Proposition prop;
    prop.id = id;
    prop.post_id = p.id;
    if (same_sentence && next_sentence_ > 0) --next_sentence_;
    prop.sentence_index = next_sentence_++;
    prop.span = {p.text.size(), p.text.size() + text.size()};
    p.text += text;
    prop.text = text;
    prop.label = label;
    p.propositions.push_back(std::move(prop));
    return *this;
  }

  ThreadBuilder& rel(const std::string& src, const std::string& tgt, RelationKind kind,
                     RelationType type = RelationType::Support) {
    thread_.relations.push_back({src, tgt, kind, type});
    return *this;
  }

  Thread build() const { return thread_; }

 private:
  Thread thread_;
  std::size_t next_sentence_ = 0;
};

inline ComponentLabel random_body_label(Rng& rng) {
  switch (uniform_index(rng, 3)) {
    case 0: return ComponentLabel::Claim;
    case 1: return ComponentLabel::Premise;
    default: return ComponentLabel::NonArgument;
  }
}

// A valid random thread: up to max_posts posts in a random reply tree, up to
// max_props body propositions per post, an optional title main claim, and a
// random subset of the legal relations as gold.
inline Thread random_thread(Rng& rng, const std::string& id, std::size_t max_posts = 6, std::size_t max_props = 12) {
  ThreadBuilder b(id);
  const std::size_t n_posts = 1 + uniform_index(rng, max_posts);
  for (std::size_t i = 0; i < n_posts; ++i) {
    const std::string pid = id + "_p" + std::to_string(i);
    std::optional<std::string> parent;
    if (i > 0) parent = id + "_p" + std::to_string(uniform_index(rng, i));
    b.post(pid, parent);
    if (i == 0 && uniform_index(rng, 2) == 0) b.title(pid + "_t", "CMV: main claim of " + id);
    const std::size_t n_props = uniform_index(rng, max_props + 1);
    for (std::size_t j = 0; j < n_props; ++j) {
      b.adu(pid + "_a" + std::to_string(j), random_body_label(rng), "",
            j > 0 && uniform_index(rng, 5) == 0);
    }
  }
  Thread t = b.build();
  ThreadIndex index(t);
  for (const auto& post : t.posts) {
    for (const auto& s : post.propositions) {
      if (s.label == ComponentLabel::Premise) {
        for (const auto& g : post.propositions) {
          if (g.id != s.id && is_argumentative(g.label) && uniform_index(rng, 4) == 0)
            t.relations.push_back({s.id, g.id, RelationKind::IntraTurn, RelationType::Support});
        }
      }
      const Post* parent = index.parent(post);
      if (parent && s.label == ComponentLabel::Claim) {
        for (const auto& g : parent->propositions) {
          if (is_argumentative(g.label) && uniform_index(rng, 4) == 0)
            t.relations.push_back({s.id, g.id, RelationKind::InterTurn, RelationType::Attack});
        }
      }
    }
  }
  return t;
}

}  // namespace tmtest
