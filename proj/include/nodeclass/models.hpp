#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nodeclass/graph.hpp"

namespace nodeclass {

enum class ModelKind { kEr, kConfiguration, kBa, kWs, kHolmeKim };

std::string_view model_kind_name(ModelKind k);
// Accepts "ER", "Configuration", "BA", "WS", "HolmeKim" (case-insensitive,
// '-' and '_' ignored).
ModelKind parse_model_kind(std::string_view s);

struct ModelSpec {
  ModelKind kind = ModelKind::kEr;
  std::size_t n = 0;
  std::size_t m = 0;
  std::optional<std::vector<std::size_t>> degree_sequence;
  double ws_rewire_p = 0.1;
  double hk_triangle_p = 1.0;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

// Spec matched to `real`: same n and m, its degree sequence for the configuration model.
ModelSpec matched_spec(ModelKind kind, const Graph& real, std::uint64_t seed);

// Attachment count per new node for BA-style models: round(m / n), at least 1.
std::size_t attachment_count(std::size_t n, std::size_t m_total);

Graph gen_er(std::size_t n, std::size_t m, std::uint64_t seed);
Graph gen_configuration(const std::vector<std::size_t>& degree_sequence, std::uint64_t seed);
Graph gen_ba(std::size_t n, std::size_t m_total, std::uint64_t seed);
Graph gen_ws(std::size_t n, std::size_t m_total, double rewire_p, std::uint64_t seed);
Graph gen_holme_kim(std::size_t n, std::size_t m_total, double triangle_p, std::uint64_t seed);

Graph generate(const ModelSpec& spec);

// Erdos-Gallai test.
bool is_graphical(std::vector<std::size_t> degrees);

}  // namespace nodeclass
