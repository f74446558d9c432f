#include "tncert/presets.h"

#include <algorithm>

#include "tncert/error.h"

namespace tncert {

namespace {

int parse_suffix(std::string_view name, std::string_view prefix) {
  std::string digits(name.substr(prefix.size()));
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit) || digits.size() > 6)
    throw Error(ErrorCode::kInvalidArgument, "bad preset '" + std::string(name) + "'");
  int n = std::stoi(digits);
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "preset parameter must be positive");
  return n;
}

}  // namespace

std::vector<std::string> preset_names() { return {"trivial", "cyclic:<n>", "z", "z2", "s3", "free:<k>"}; }

PresentationPtr preset_presentation(std::string_view name) {
  if (name == "trivial") return parse_presentation("gens t\nbackend cyclic 1\n");
  if (name.rfind("cyclic:", 0) == 0)
    return parse_presentation("gens t\nbackend cyclic " + std::to_string(parse_suffix(name, "cyclic:")) + "\n");
  if (name == "z") return parse_presentation("gens t\nbackend free\n");
  if (name == "z2") return parse_presentation("gens a b\nrel a b a^-1 b^-1\nbackend free-abelian\n");
  if (name == "s3")
    return parse_presentation("gens a b\nrel a^2\nrel b^2\nrel a b a b a b\nbackend perm a=(1 2) b=(2 3)\n");
  if (name.rfind("free:", 0) == 0) {
    int k = parse_suffix(name, "free:");
    std::string gens = "gens";
    for (int i = 1; i <= k; ++i) gens += " x" + std::to_string(i);
    return parse_presentation(gens + "\nbackend free\n");
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + std::string(name) + "'");
}

ChainComplexData complex_for(const PresentationPtr& p, int min_top_degree) {
  if (p->backend->is_finite()) {
    auto ball = enumerate_ball(p, Ball::kFull);
    if (p->kind == BackendKind::kCyclic && p->explicit_relators == 0)
      return cyclic_resolution(p->cyclic_order, std::max(4, min_top_degree), ball);
    return extend_finite_resolution(build_presentation_complex(p, ball), std::max(3, min_top_degree));
  }
  int radius = 1;
  for (const auto& r : p->relators) radius = std::max<int>(radius, static_cast<int>(r.length()));
  return build_presentation_complex(p, enumerate_ball(p, radius));
}

ChainComplexData preset_complex(std::string_view name, int min_top_degree) {
  return complex_for(preset_presentation(name), min_top_degree);
}

}  // namespace tncert
