#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "threadmine/error.hpp"

namespace threadmine {

enum class ComponentLabel { MainClaim, Claim, Premise, NonArgument };
enum class RelationKind { IntraTurn, InterTurn };
enum class RelationType { Support, Attack, Agreement, PartialAgreement, Rebuttal, Undercutter, PartialAttack };

std::string_view to_string(ComponentLabel label);
std::string_view to_string(RelationKind kind);
std::string_view to_string(RelationType type);
std::optional<ComponentLabel> parse_component_label(std::string_view text);
std::optional<RelationKind> parse_relation_kind(std::string_view text);
std::optional<RelationType> parse_relation_type(std::string_view text);

// MainClaim, Claim or Premise: the labels that may be a relation target.
inline bool is_argumentative(ComponentLabel label) { return label != ComponentLabel::NonArgument; }
// Claim or MainClaim.
inline bool is_claim_like(ComponentLabel label) {
  return label == ComponentLabel::Claim || label == ComponentLabel::MainClaim;
}

struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool overlaps(const ByteSpan& o) const { return start < o.end && o.start < end; }
  bool operator==(const ByteSpan&) const = default;
};

/// An argumentative discourse unit. Title propositions index into the post
/// title; every other proposition indexes into the post body.
struct Proposition {
  std::string id;
  std::string post_id;
  std::size_t sentence_index = 0;
  ByteSpan span;
  std::string text;
  ComponentLabel label = ComponentLabel::NonArgument;
  bool in_title = false;
};

struct Post {
  std::string id;
  std::string author;
  std::optional<std::string> parent_id;
  std::string text;
  std::optional<std::string> title;
  std::vector<Proposition> propositions;

  bool is_root() const { return !parent_id.has_value(); }
};

struct RelationInstance {
  std::string source_id;
  std::string target_id;
  RelationKind kind = RelationKind::IntraTurn;
  RelationType type = RelationType::Support;
};

struct Thread {
  std::string id;
  std::vector<Post> posts;
  std::vector<RelationInstance> relations;
};

/// Read-only lookup tables over a thread. The thread must outlive the index.
class ThreadIndex {
 public:
  explicit ThreadIndex(const Thread& thread);

  const Thread& thread() const { return *thread_; }
  const Post* post(std::string_view id) const;
  const Proposition* proposition(std::string_view id) const;
  const Post* post_of(std::string_view proposition_id) const;
  // Position of the proposition within its post's list.
  std::size_t position_in_post(std::string_view proposition_id) const;
  const Post* parent(const Post& post) const;
  // Ancestors of a post, nearest first. Stops at cycles.
  std::vector<const Post*> ancestors(const Post& post) const;
  const Post* root() const;
  std::optional<std::string> main_claim_id() const;

 private:
  const Thread* thread_;
  std::unordered_map<std::string, std::size_t> post_by_id_;
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> prop_by_id_;
};

struct Violation {
  std::string rule;
  std::vector<std::string> ids;
  std::string message;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string thread_id, std::vector<Violation> violations);

  const std::string& thread_id() const { return thread_id_; }
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::string thread_id_;
  std::vector<Violation> violations_;
};

// Rule names reported by validate_thread.
namespace rules {
inline constexpr std::string_view kDuplicatePost = "duplicate-post-id";
inline constexpr std::string_view kDuplicateProposition = "duplicate-proposition-id";
inline constexpr std::string_view kSingleRoot = "single-root";
inline constexpr std::string_view kParentResolves = "parent-resolves";
inline constexpr std::string_view kReplyCycle = "reply-cycle";
inline constexpr std::string_view kPostMembership = "proposition-post-id";
inline constexpr std::string_view kSpanBounds = "span-bounds";
inline constexpr std::string_view kSpanText = "span-text";
inline constexpr std::string_view kSpanOverlap = "span-overlap";
inline constexpr std::string_view kDocumentOrder = "document-order";
inline constexpr std::string_view kSentenceOrder = "sentence-order";
inline constexpr std::string_view kMainClaimTitle = "main-claim-title";
inline constexpr std::string_view kRelationEndpoint = "relation-endpoint";
inline constexpr std::string_view kSelfRelation = "self-relation";
inline constexpr std::string_view kIntraSamePost = "intra-same-post";
inline constexpr std::string_view kIntraSourcePremise = "intra-source-premise";
inline constexpr std::string_view kInterDifferentPost = "inter-different-post";
inline constexpr std::string_view kInterSourceClaim = "inter-source-claim";
inline constexpr std::string_view kTargetLabel = "target-label";
inline constexpr std::string_view kTokenSyntax = "token-syntax";
}  // namespace rules

std::vector<Violation> validate_thread(const Thread& thread);

// Parses one thread document; throws ParseError or ValidationError.
Thread parse_thread(std::string_view document, std::string_view source = "<input>");
// Parses a file holding any number of thread documents back to back.
std::vector<Thread> parse_threads(std::string_view document, std::string_view source = "<input>");
std::string serialize_thread(const Thread& thread);

// A directory (every *.thread file, sorted by name) or a single file.
std::vector<Thread> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& file, const std::vector<Thread>& corpus);

struct CorpusStats {
  std::size_t threads = 0;
  std::size_t posts = 0;
  std::size_t sentences = 0;
  double sentences_per_post = 0.0;
  std::map<ComponentLabel, std::size_t> component_counts;
  std::map<std::pair<RelationKind, RelationType>, std::size_t> relation_counts;
  // Signed distance sentence_index(source) - sentence_index(target).
  std::map<int, std::size_t> intra_distance_histogram;
  std::size_t intra_pairs = 0;
  std::size_t intra_positive = 0;
  std::size_t inter_pairs = 0;
  std::size_t inter_positive = 0;
  double positive_rate_intra = 0.0;
  double positive_rate_inter = 0.0;
  // False when the denominator is zero; the rate is then reported as 0.
  bool intra_rate_defined = false;
  bool inter_rate_defined = false;
};

// Candidate-pair denominators use direct-parent inter-turn scope.
CorpusStats corpus_stats(const std::vector<Thread>& corpus);
std::string format_stats(const CorpusStats& stats);

struct CorpusSplit {
  std::vector<Thread> train;
  std::vector<Thread> test;
};

// Thread-level split; |test| = round(fraction * n), at least 1 and at most n-1.
CorpusSplit split_corpus(const std::vector<Thread>& corpus, double test_fraction, std::uint64_t seed);

}  // namespace threadmine
