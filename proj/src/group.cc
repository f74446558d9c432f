#include "tncert/group.h"

#include <algorithm>
#include <cctype>
#include <deque>
#include <regex>
#include <sstream>

#include "tncert/error.h"
#include "tncert/exact_linalg.h"

namespace tncert {

bool FreeWord::is_reduced() const {
  for (std::size_t i = 1; i < letters.size(); ++i)
    if (letters[i].generator == letters[i - 1].generator && letters[i].exponent == -letters[i - 1].exponent)
      return false;
  return true;
}

FreeWord FreeWord::inverse() const {
  FreeWord inv;
  inv.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) inv.letters.push_back({it->generator, -it->exponent});
  return inv;
}

FreeWord concat(const FreeWord& u, const FreeWord& v) {
  FreeWord w = u;
  w.letters.insert(w.letters.end(), v.letters.begin(), v.letters.end());
  return w;
}

FreeWord power(const FreeWord& w, int exponent) {
  FreeWord base = exponent < 0 ? w.inverse() : w;
  FreeWord out;
  for (int i = 0; i < std::abs(exponent); ++i) out = concat(out, base);
  return out;
}

std::size_t GroupElementHash::operator()(const GroupElement& g) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto v : g.data) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

namespace {

// ---------------------------------------------------------------- backends

class FreeBackend final : public GroupBackend {
 public:
  explicit FreeBackend(int rank) : rank_(rank) {}
  GroupElement identity() const override { return {}; }
  GroupElement generator(int i) const override { return {{static_cast<std::int64_t>(i + 1)}}; }
  GroupElement multiply(const GroupElement& x, const GroupElement& y) const override {
    GroupElement out = x;
    for (auto letter : y.data) {
      if (!out.data.empty() && out.data.back() == -letter)
        out.data.pop_back();
      else
        out.data.push_back(letter);
    }
    return out;
  }
  GroupElement inverse(const GroupElement& x) const override {
    GroupElement out;
    for (auto it = x.data.rbegin(); it != x.data.rend(); ++it) out.data.push_back(-*it);
    return out;
  }
  bool is_finite() const override { return rank_ == 0; }

 private:
  int rank_;
};

class FreeAbelianBackend final : public GroupBackend {
 public:
  explicit FreeAbelianBackend(int rank) : rank_(rank) {}
  GroupElement identity() const override { return {std::vector<std::int64_t>(rank_, 0)}; }
  GroupElement generator(int i) const override {
    GroupElement g = identity();
    g.data[i] = 1;
    return g;
  }
  GroupElement multiply(const GroupElement& x, const GroupElement& y) const override {
    GroupElement out = x;
    for (int i = 0; i < rank_; ++i) out.data[i] += y.data[i];
    return out;
  }
  GroupElement inverse(const GroupElement& x) const override {
    GroupElement out = x;
    for (auto& v : out.data) v = -v;
    return out;
  }
  bool is_finite() const override { return rank_ == 0; }

 private:
  int rank_;
};

class CyclicBackend final : public GroupBackend {
 public:
  explicit CyclicBackend(int order) : order_(order) {}
  GroupElement identity() const override { return {{0}}; }
  GroupElement generator(int) const override { return {{order_ == 1 ? 0 : 1}}; }
  GroupElement multiply(const GroupElement& x, const GroupElement& y) const override {
    return {{(x.data[0] + y.data[0]) % order_}};
  }
  GroupElement inverse(const GroupElement& x) const override { return {{(order_ - x.data[0]) % order_}}; }
  bool is_finite() const override { return true; }

 private:
  std::int64_t order_;
};

class PermutationBackend final : public GroupBackend {
 public:
  PermutationBackend(int degree, std::vector<std::vector<int>> images) : degree_(degree), images_(std::move(images)) {}
  GroupElement identity() const override {
    GroupElement g;
    for (int i = 0; i < degree_; ++i) g.data.push_back(i);
    return g;
  }
  GroupElement generator(int i) const override {
    GroupElement g;
    for (int v : images_[i]) g.data.push_back(v);
    return g;
  }
  // Left-to-right composition: (x·y)(i) = y(x(i)).
  GroupElement multiply(const GroupElement& x, const GroupElement& y) const override {
    GroupElement out;
    out.data.resize(degree_);
    for (int i = 0; i < degree_; ++i) out.data[i] = y.data[x.data[i]];
    return out;
  }
  GroupElement inverse(const GroupElement& x) const override {
    GroupElement out;
    out.data.resize(degree_);
    for (int i = 0; i < degree_; ++i) out.data[x.data[i]] = i;
    return out;
  }
  bool is_finite() const override { return true; }

 private:
  int degree_;
  std::vector<std::vector<int>> images_;
};

class IntegerMatrixBackend final : public GroupBackend {
 public:
  IntegerMatrixBackend(int dim, std::vector<std::vector<std::int64_t>> mats) : dim_(dim), mats_(std::move(mats)) {}
  GroupElement identity() const override {
    GroupElement g;
    g.data.assign(static_cast<std::size_t>(dim_) * dim_, 0);
    for (int i = 0; i < dim_; ++i) g.data[i * dim_ + i] = 1;
    return g;
  }
  GroupElement generator(int i) const override { return {mats_[i]}; }
  GroupElement multiply(const GroupElement& x, const GroupElement& y) const override {
    GroupElement out;
    out.data.assign(static_cast<std::size_t>(dim_) * dim_, 0);
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < dim_; ++k) {
        std::int64_t a = x.data[i * dim_ + k];
        if (a == 0) continue;
        for (int j = 0; j < dim_; ++j) {
          std::int64_t prod;
          std::int64_t& acc = out.data[i * dim_ + j];
          if (__builtin_mul_overflow(a, y.data[k * dim_ + j], &prod) || __builtin_add_overflow(acc, prod, &acc))
            throw Error(ErrorCode::kInvalidArgument, "integer matrix entries overflow 64 bits");
        }
      }
    return out;
  }
  GroupElement inverse(const GroupElement& x) const override {
    RationalMatrix m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m(i, j) = Rational(static_cast<long>(x.data[i * dim_ + j]));
    RationalMatrix inv = tncert::inverse(m);
    GroupElement out;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        const Rational& q = inv(i, j);
        if (q.get_den() != 1 || !q.get_num().fits_slong_p())
          throw Error(ErrorCode::kInvalidArgument, "integer matrix is not invertible over Z");
        out.data.push_back(q.get_num().get_si());
      }
    return out;
  }
  bool is_finite() const override { return false; }

 private:
  int dim_;
  std::vector<std::vector<std::int64_t>> mats_;
};

// ----------------------------------------------------------------- parsing

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ws(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

long parse_int(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParseError, "expected integer in " + context + ", got '" + s + "'");
  }
}

// Splits "a=(1 2) b=(2 3)" into (name, value) pairs.
std::vector<std::pair<std::string, std::string>> named_values(const std::string& body) {
  static const std::regex key(R"(([A-Za-z_][A-Za-z0-9_]*)\s*=)");
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::smatch> matches;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), key); it != std::sregex_iterator(); ++it)
    matches.push_back(*it);
  if (matches.empty() || !trim(body.substr(0, matches.front().position())).empty())
    throw Error(ErrorCode::kParseError, "expected <name>=<value> list, got '" + body + "'");
  for (std::size_t i = 0; i < matches.size(); ++i) {
    std::size_t start = matches[i].position() + matches[i].length();
    std::size_t end = i + 1 < matches.size() ? static_cast<std::size_t>(matches[i + 1].position()) : body.size();
    out.emplace_back(matches[i][1].str(), trim(body.substr(start, end - start)));
  }
  return out;
}

// "(1 2)(3,4)" -> list of cycles with 0-based points.
std::vector<std::vector<int>> parse_cycles(const std::string& text) {
  std::vector<std::vector<int>> cycles;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    if (text[i] != '(') throw Error(ErrorCode::kParseError, "bad cycle notation '" + text + "'");
    std::size_t close = text.find(')', i);
    if (close == std::string::npos) throw Error(ErrorCode::kParseError, "unclosed cycle in '" + text + "'");
    std::string inner = text.substr(i + 1, close - i - 1);
    std::replace(inner.begin(), inner.end(), ',', ' ');
    std::vector<int> cycle;
    for (const auto& tok : split_ws(inner)) {
      long v = parse_int(tok, "cycle");
      if (v < 1) throw Error(ErrorCode::kParseError, "permutation points are 1-based");
      cycle.push_back(static_cast<int>(v - 1));
    }
    cycles.push_back(std::move(cycle));
    i = close + 1;
  }
  return cycles;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == '[' || c == ']' || c == ',') c = ' ';
  std::vector<std::int64_t> out;
  for (const auto& tok : split_ws(s)) out.push_back(parse_int(tok, "matrix"));
  return out;
}

void validate(Presentation& p) {
  for (const auto& w : p.relators) {
    for (auto l : w.letters)
      if (l.generator < 0 || l.generator >= static_cast<int>(p.rank()))
        throw Error(ErrorCode::kUndeclaredGenerator, "relator uses an undeclared generator");
    if (!w.is_reduced()) throw Error(ErrorCode::kUnreducedRelator, "relator '" + to_text(p, w) + "' is not freely reduced");
  }
  int n = static_cast<int>(p.rank());
  switch (p.kind) {
    case BackendKind::kFree: p.backend = std::make_shared<FreeBackend>(n); break;
    case BackendKind::kFreeAbelian: p.backend = std::make_shared<FreeAbelianBackend>(n); break;
    case BackendKind::kCyclic: {
      if (n != 1) throw Error(ErrorCode::kParseError, "cyclic backend needs exactly one generator");
      if (p.cyclic_order < 1) throw Error(ErrorCode::kParseError, "cyclic order must be positive");
      p.backend = std::make_shared<CyclicBackend>(p.cyclic_order);
      FreeWord implicit = power(FreeWord{{{0, 1}}}, p.cyclic_order);
      p.relators.resize(p.explicit_relators);
      p.relators.push_back(implicit);
      break;
    }
    case BackendKind::kPermutation: {
      if (p.permutations.size() != p.rank())
        throw Error(ErrorCode::kParseError, "perm backend needs one image per generator");
      for (const auto& img : p.permutations) {
        if (static_cast<int>(img.size()) != p.permutation_degree)
          throw Error(ErrorCode::kParseError, "permutation images have inconsistent degree");
        std::vector<bool> seen(p.permutation_degree, false);
        for (int v : img) {
          if (v < 0 || v >= p.permutation_degree || seen[v])
            throw Error(ErrorCode::kParseError, "permutation image is not a bijection");
          seen[v] = true;
        }
      }
      p.backend = std::make_shared<PermutationBackend>(p.permutation_degree, p.permutations);
      break;
    }
    case BackendKind::kIntegerMatrix: {
      if (p.matrices.size() != p.rank()) throw Error(ErrorCode::kParseError, "zmat backend needs one matrix per generator");
      auto backend = std::make_shared<IntegerMatrixBackend>(p.matrix_dim, p.matrices);
      for (std::size_t i = 0; i < p.rank(); ++i) {
        if (p.matrices[i].size() != static_cast<std::size_t>(p.matrix_dim) * p.matrix_dim)
          throw Error(ErrorCode::kParseError, "zmat matrices have inconsistent size");
        backend->inverse(backend->generator(static_cast<int>(i)));  // throws if not in GL(n,Z)
      }
      p.backend = backend;
      break;
    }
  }
  GroupElement e = p.backend->identity();
  for (std::size_t i = 0; i < p.explicit_relators; ++i)
    if (!(eval_word(p, p.relators[i]) == e))
      throw Error(ErrorCode::kBackendRelatorViolation,
                  "relator '" + to_text(p, p.relators[i]) + "' is not trivial in the backend");
}

}  // namespace

std::optional<int> Presentation::generator_index(std::string_view name) const {
  for (std::size_t i = 0; i < generators.size(); ++i)
    if (generators[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

FreeWord parse_word(const Presentation& p, std::string_view text) {
  FreeWord w;
  for (const auto& tok : split_ws(text)) {
    std::string name = tok;
    long exponent = 1;
    if (auto caret = tok.find('^'); caret != std::string::npos) {
      name = tok.substr(0, caret);
      exponent = parse_int(tok.substr(caret + 1), "exponent of '" + name + "'");
    }
    if (name == "1" && !p.generator_index(name)) continue;
    auto idx = p.generator_index(name);
    if (!idx) throw Error(ErrorCode::kUndeclaredGenerator, "'" + name + "' is not a declared generator");
    for (long i = 0; i < std::abs(exponent); ++i) w.letters.push_back({*idx, exponent > 0 ? 1 : -1});
  }
  return w;
}

std::string to_text(const Presentation& p, const FreeWord& w) {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.letters.size()) {
    std::size_t j = i;
    while (j < w.letters.size() && w.letters[j] == w.letters[i]) ++j;
    if (!out.empty()) out += ' ';
    out += p.generators[w.letters[i].generator];
    long e = static_cast<long>(j - i) * w.letters[i].exponent;
    if (e != 1) out += "^" + std::to_string(e);
    i = j;
  }
  return out;
}

PresentationPtr parse_presentation(std::string_view text) {
  std::vector<std::string> statements;
  {
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::size_t start = 0;
      while (true) {
        std::size_t semi = line.find(';', start);
        std::string stmt = trim(line.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
        if (!stmt.empty()) statements.push_back(stmt);
        if (semi == std::string::npos) break;
        start = semi + 1;
      }
    }
  }

  Presentation p;
  bool have_gens = false;
  std::vector<std::string> relator_texts;
  std::vector<std::string> image_names;  // generator named by each backend image
  for (const auto& stmt : statements) {
    auto space = stmt.find_first_of(" \t");
    std::string keyword = stmt.substr(0, space);
    std::string body = space == std::string::npos ? "" : trim(stmt.substr(space));
    if (keyword == "gens") {
      if (have_gens) throw Error(ErrorCode::kParseError, "duplicate gens statement");
      have_gens = true;
      for (const auto& name : split_ws(body)) {
        if (!valid_name(name)) throw Error(ErrorCode::kParseError, "bad generator name '" + name + "'");
        if (p.generator_index(name)) throw Error(ErrorCode::kParseError, "duplicate generator '" + name + "'");
        p.generators.push_back(name);
      }
    } else if (keyword == "rel") {
      relator_texts.push_back(body);
    } else if (keyword == "backend") {
      auto parts = split_ws(body);
      if (parts.empty()) throw Error(ErrorCode::kParseError, "backend needs a kind");
      const std::string& kind = parts[0];
      std::string rest = trim(body.substr(kind.size()));
      if (kind == "free") {
        p.kind = BackendKind::kFree;
      } else if (kind == "free-abelian") {
        p.kind = BackendKind::kFreeAbelian;
      } else if (kind == "cyclic") {
        p.kind = BackendKind::kCyclic;
        if (parts.size() != 2) throw Error(ErrorCode::kParseError, "usage: backend cyclic <n>");
        p.cyclic_order = static_cast<int>(parse_int(parts[1], "cyclic order"));
      } else if (kind == "perm" || kind == "zmat") {
        p.kind = kind == "perm" ? BackendKind::kPermutation : BackendKind::kIntegerMatrix;
        auto values = named_values(rest);
        image_names.clear();
        for (auto& [name, value] : values) image_names.push_back(name);
        if (kind == "perm") {
          std::vector<std::vector<std::vector<int>>> cycles;
          int degree = 0;
          for (auto& [name, value] : values) {
            cycles.push_back(parse_cycles(value));
            for (const auto& c : cycles.back())
              for (int v : c) degree = std::max(degree, v + 1);
          }
          p.permutation_degree = degree;
          p.permutations.clear();
          for (const auto& cs : cycles) {
            std::vector<int> img(degree);
            for (int i = 0; i < degree; ++i) img[i] = i;
            std::vector<bool> used(degree, false);
            for (const auto& c : cs)
              for (std::size_t k = 0; k < c.size(); ++k) {
                if (used[c[k]]) throw Error(ErrorCode::kParseError, "cycles are not disjoint");
                used[c[k]] = true;
                img[c[k]] = c[(k + 1) % c.size()];
              }
            p.permutations.push_back(std::move(img));
          }
        } else {
          p.matrices.clear();
          for (auto& [name, value] : values) {
            auto entries = parse_int_list(value);
            int dim = 0;
            while (static_cast<std::size_t>(dim) * dim < entries.size()) ++dim;
            if (static_cast<std::size_t>(dim) * dim != entries.size() || dim == 0)
              throw Error(ErrorCode::kParseError, "zmat entry count is not a perfect square for '" + name + "'");
            if (p.matrix_dim != 0 && p.matrix_dim != dim)
              throw Error(ErrorCode::kParseError, "zmat matrices have inconsistent size");
            p.matrix_dim = dim;
            p.matrices.push_back(std::move(entries));
          }
        }
      } else {
        throw Error(ErrorCode::kParseError, "unknown backend '" + kind + "'");
      }
    } else {
      throw Error(ErrorCode::kParseError, "unknown statement '" + keyword + "'");
    }
  }
  if (!have_gens) throw Error(ErrorCode::kParseError, "missing gens statement");

  // Reorder backend images to the declared generator order.
  if (p.kind == BackendKind::kPermutation || p.kind == BackendKind::kIntegerMatrix) {
    const auto& names = image_names;
    if (names.size() != p.rank())
      throw Error(ErrorCode::kParseError, "backend must give exactly one image per generator");
    std::vector<int> order(p.rank(), -1);
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto idx = p.generator_index(names[i]);
      if (!idx) throw Error(ErrorCode::kUndeclaredGenerator, "'" + names[i] + "' is not a declared generator");
      if (order[*idx] != -1) throw Error(ErrorCode::kParseError, "duplicate image for '" + names[i] + "'");
      order[*idx] = static_cast<int>(i);
    }
    if (p.kind == BackendKind::kPermutation) {
      auto images = p.permutations;
      for (std::size_t g = 0; g < p.rank(); ++g) p.permutations[g] = images[order[g]];
    } else {
      auto mats = p.matrices;
      for (std::size_t g = 0; g < p.rank(); ++g) p.matrices[g] = mats[order[g]];
    }
  }

  for (const auto& rt : relator_texts) p.relators.push_back(parse_word(p, rt));
  p.explicit_relators = p.relators.size();
  validate(p);
  return std::make_shared<const Presentation>(std::move(p));
}

PresentationPtr make_presentation(Presentation p) {
  p.explicit_relators = std::min(p.explicit_relators, p.relators.size());
  validate(p);
  return std::make_shared<const Presentation>(std::move(p));
}

std::string to_text(const Presentation& p) {
  std::ostringstream out;
  out << "gens";
  for (const auto& g : p.generators) out << ' ' << g;
  out << '\n';
  for (std::size_t i = 0; i < p.explicit_relators; ++i) out << "rel " << to_text(p, p.relators[i]) << '\n';
  out << "backend ";
  switch (p.kind) {
    case BackendKind::kFree: out << "free"; break;
    case BackendKind::kFreeAbelian: out << "free-abelian"; break;
    case BackendKind::kCyclic: out << "cyclic " << p.cyclic_order; break;
    case BackendKind::kPermutation: {
      out << "perm";
      for (std::size_t g = 0; g < p.rank(); ++g) {
        out << ' ' << p.generators[g] << '=';
        const auto& img = p.permutations[g];
        std::vector<bool> done(img.size(), false);
        bool any = false;
        for (std::size_t s = 0; s < img.size(); ++s) {
          if (done[s] || img[s] == static_cast<int>(s)) continue;
          out << '(';
          std::size_t x = s;
          bool first = true;
          while (!done[x]) {
            done[x] = true;
            out << (first ? "" : " ") << x + 1;
            first = false;
            x = img[x];
          }
          out << ')';
          any = true;
        }
        if (!any) out << "()";
      }
      break;
    }
    case BackendKind::kIntegerMatrix: {
      out << "zmat";
      for (std::size_t g = 0; g < p.rank(); ++g) {
        out << ' ' << p.generators[g] << "=[";
        for (std::size_t k = 0; k < p.matrices[g].size(); ++k) out << (k ? "," : "") << p.matrices[g][k];
        out << ']';
      }
      break;
    }
  }
  out << '\n';
  return out.str();
}

GroupElement eval_word(const Presentation& p, const FreeWord& w) {
  GroupElement g = p.backend->identity();
  for (auto l : w.letters) {
    if (l.generator < 0 || l.generator >= static_cast<int>(p.rank()))
      throw Error(ErrorCode::kUndeclaredGenerator, "letter index out of range");
    GroupElement s = p.backend->generator(l.generator);
    g = p.backend->multiply(g, l.exponent > 0 ? s : p.backend->inverse(s));
  }
  return g;
}

// -------------------------------------------------------------------- balls

std::optional<int> Ball::find(const GroupElement& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

FreeWord Ball::word(int i) const {
  FreeWord w;
  while (parent_[i] >= 0) {
    int s = parent_generator_[i];
    w.letters.push_back({s / 2, s % 2 == 0 ? 1 : -1});
    i = parent_[i];
  }
  std::reverse(w.letters.begin(), w.letters.end());
  return w;
}

BallPtr enumerate_ball(PresentationPtr p, int radius, std::size_t cap) {
  if (radius < 0 && radius != Ball::kFull) throw Error(ErrorCode::kInvalidArgument, "negative radius");
  auto ball = std::make_shared<Ball>();
  ball->presentation_ = p;
  ball->rank_ = p->rank();
  const auto& backend = *p->backend;
  const std::size_t sym = 2 * p->rank();
  std::vector<GroupElement> gens;
  for (std::size_t g = 0; g < p->rank(); ++g) {
    gens.push_back(backend.generator(static_cast<int>(g)));
    gens.push_back(backend.inverse(gens.back()));
  }

  auto add = [&](GroupElement g, int length, int parent, int via) {
    if (ball->elements_.size() >= cap)
      throw Error(ErrorCode::kBallBudgetExceeded, "ball exceeds " + std::to_string(cap) + " elements");
    int idx = static_cast<int>(ball->elements_.size());
    ball->index_.emplace(g, idx);
    ball->elements_.push_back(std::move(g));
    ball->word_length_.push_back(length);
    ball->parent_.push_back(parent);
    ball->parent_generator_.push_back(via);
    ball->edges_.insert(ball->edges_.end(), sym, -1);
    return idx;
  };

  add(backend.identity(), 0, -1, -1);
  bool complete = true;
  std::size_t level_begin = 0;
  int level = 0;
  while (level_begin < ball->elements_.size()) {
    std::size_t level_end = ball->elements_.size();
    bool may_grow = radius == Ball::kFull || level < radius;
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (std::size_t s = 0; s < sym; ++s) {
        GroupElement prod = backend.multiply(ball->elements_[i], gens[s]);
        int target;
        if (auto found = ball->find(prod)) {
          target = *found;
        } else if (may_grow) {
          target = add(std::move(prod), level + 1, static_cast<int>(i), static_cast<int>(s));
        } else {
          complete = false;
          continue;
        }
        ball->edges_[i * sym + s] = target;
      }
    }
    level_begin = level_end;
    if (level_begin < ball->elements_.size()) ++level;
    if (!may_grow) break;
  }
  ball->complete_ = complete;
  ball->radius_ = radius == Ball::kFull ? level : radius;

  ball->inverse_.resize(ball->elements_.size());
  for (std::size_t i = 0; i < ball->elements_.size(); ++i) {
    auto inv = ball->find(backend.inverse(ball->elements_[i]));
    if (!inv) throw Error(ErrorCode::kInvalidArgument, "ball is not closed under inversion");
    ball->inverse_[i] = *inv;
  }
  return ball;
}

int product_index(const Ball& ball, int x, int y) {
  if (!ball.can_multiply(x, y))
    throw Error(ErrorCode::kRadiusTooSmall, "product of elements of lengths " + std::to_string(ball.word_length(x)) +
                                                " and " + std::to_string(ball.word_length(y)) +
                                                " needs a ball of radius " +
                                                std::to_string(ball.word_length(x) + ball.word_length(y)));
  const auto& backend = *ball.presentation()->backend;
  auto idx = ball.find(backend.multiply(ball.element(x), ball.element(y)));
  if (!idx) throw Error(ErrorCode::kRadiusTooSmall, "product left the ball");
  return *idx;
}

}  // namespace tncert
