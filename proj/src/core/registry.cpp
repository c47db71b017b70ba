#include "nxs/core/registry.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

namespace nxs {

std::filesystem::path BuildContext::resolve(const std::string& file) const {
  std::filesystem::path p(file);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

void NodeRegistry::add(NodeKind kind) {
  if (find(kind.kind)) throw Error(Errc::invalid_parameter, "node kind registered twice: " + kind.kind);
  kinds_.push_back(std::move(kind));
}

const NodeKind* NodeRegistry::find(std::string_view kind) const {
  for (const auto& k : kinds_) {
    if (k.kind == kind) return &k;
  }
  return nullptr;
}

std::vector<const NodeKind*> NodeRegistry::kinds() const {
  std::vector<const NodeKind*> out;
  for (const auto& k : kinds_) out.push_back(&k);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->kind < b->kind; });
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const bool same = std::tolower(static_cast<unsigned char>(a[i - 1])) ==
                        std::tolower(static_cast<unsigned char>(b[j - 1]));
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (same ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string NodeRegistry::nearest(std::string_view kind) const {
  std::string best;
  std::size_t best_d = std::max<std::size_t>(3, kind.size() / 3) + 1;
  for (const auto& k : kinds_) {
    const auto d = edit_distance(kind, k.kind);
    if (d < best_d) {
      best_d = d;
      best = k.kind;
    }
  }
  return best;
}

std::string NodeRegistry::help_text() const {
  std::string out = "Node kinds:\n";
  for (const auto* k : kinds()) {
    out += fmt::format("  {:<26}{}\n", k->kind, k->summary);
    for (const auto& p : k->params) {
      std::string def = p.required ? "required" : "default " + p.default_value;
      out += fmt::format("      {:<16}{:<14}{} ({})\n", p.name, p.type, p.help, def);
    }
  }
  return out;
}

}  // namespace nxs
