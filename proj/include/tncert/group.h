#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tncert {

struct Letter {
  int generator = 0;
  int exponent = 1;  // +1 or -1
  bool operator==(const Letter&) const = default;
};

// A word in the generators; the empty word is the identity.
struct FreeWord {
  std::vector<Letter> letters;

  std::size_t length() const { return letters.size(); }
  bool empty() const { return letters.empty(); }
  bool is_reduced() const;
  FreeWord inverse() const;
  bool operator==(const FreeWord&) const = default;
};

FreeWord concat(const FreeWord& u, const FreeWord& v);
FreeWord power(const FreeWord& w, int exponent);

// Canonical form of a group element. Two handles compare equal exactly when
// they denote the same element; the encoding is backend specific (reduced
// word, exponent vector, residue, permutation images, matrix entries).
struct GroupElement {
  std::vector<std::int64_t> data;
  bool operator==(const GroupElement&) const = default;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const noexcept;
};

enum class BackendKind { kFree, kFreeAbelian, kCyclic, kPermutation, kIntegerMatrix };

class GroupBackend {
 public:
  virtual ~GroupBackend() = default;
  virtual GroupElement identity() const = 0;
  virtual GroupElement generator(int index) const = 0;
  virtual GroupElement multiply(const GroupElement& x, const GroupElement& y) const = 0;
  virtual GroupElement inverse(const GroupElement& x) const = 0;
  virtual bool is_finite() const = 0;
};

struct Presentation {
  std::vector<std::string> generators;
  // Relators in order; the trailing implicit ones (e.g. t^n for a cyclic
  // backend) are not echoed by to_text.
  std::vector<FreeWord> relators;
  std::size_t explicit_relators = 0;

  BackendKind kind = BackendKind::kFree;
  int cyclic_order = 0;
  int permutation_degree = 0;
  std::vector<std::vector<int>> permutations;  // 0-based images per generator
  int matrix_dim = 0;
  std::vector<std::vector<std::int64_t>> matrices;  // row-major per generator

  std::shared_ptr<const GroupBackend> backend;

  std::size_t rank() const { return generators.size(); }
  std::optional<int> generator_index(std::string_view name) const;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

// Grammar (statements separated by newlines or ';', '#' starts a comment):
//   gens <name>+
//   rel <word>
//   backend free | free-abelian | cyclic <n> | perm <g>=<cycles>... | zmat <g>=[<ints>]...
PresentationPtr parse_presentation(std::string_view text);

// Canonical text that parses back to an equal presentation.
std::string to_text(const Presentation& p);

FreeWord parse_word(const Presentation& p, std::string_view text);
std::string to_text(const Presentation& p, const FreeWord& w);

GroupElement eval_word(const Presentation& p, const FreeWord& w);

// Builds a presentation directly (used by presets); validates like the parser.
PresentationPtr make_presentation(Presentation p);

inline constexpr std::size_t kDefaultBallCap = 200000;

// Breadth-first ball in the Cayley graph for S ∪ S^-1. Elements are ordered by
// (word length, discovery order) with the identity at index 0; the ordering is
// a prefix of the ordering of any larger ball of the same presentation, so
// element indices stay valid when moving to a larger ball.
class Ball {
 public:
  static constexpr int kFull = -1;

  const PresentationPtr& presentation() const { return presentation_; }
  int radius() const { return radius_; }
  // True when the ball is the whole (finite) group.
  bool complete() const { return complete_; }
  std::size_t size() const { return elements_.size(); }

  const GroupElement& element(int i) const { return elements_[i]; }
  int word_length(int i) const { return word_length_[i]; }
  int inverse(int i) const { return inverse_[i]; }
  // Index of x·s for the symmetrized generator s (2j = gen j, 2j+1 = its
  // inverse), or -1 when the product leaves the ball.
  int edge(int i, int symmetric_generator) const {
    return edges_[static_cast<std::size_t>(i) * 2 * rank_ + symmetric_generator];
  }
  std::optional<int> find(const GroupElement& g) const;
  // A shortest word for element i (following the BFS tree).
  FreeWord word(int i) const;
  // Whether x·y is guaranteed to be a member.
  bool can_multiply(int x, int y) const {
    return complete_ || word_length_[x] + word_length_[y] <= radius_;
  }

 private:
  friend std::shared_ptr<const Ball> enumerate_ball(PresentationPtr, int, std::size_t);

  PresentationPtr presentation_;
  int radius_ = 0;
  bool complete_ = false;
  std::size_t rank_ = 0;
  std::vector<GroupElement> elements_;
  std::vector<int> word_length_;
  std::vector<int> inverse_;
  std::vector<int> edges_;
  std::vector<int> parent_;
  std::vector<int> parent_generator_;
  std::unordered_map<GroupElement, int, GroupElementHash> index_;
};

using BallPtr = std::shared_ptr<const Ball>;

// radius == Ball::kFull enumerates a finite group completely.
// Throws kBallBudgetExceeded when more than cap elements would be needed.
BallPtr enumerate_ball(PresentationPtr p, int radius, std::size_t cap = kDefaultBallCap);

// Index of x·y. Throws kRadiusTooSmall when the radii do not guarantee
// membership.
int product_index(const Ball& ball, int x, int y);

}  // namespace tncert
