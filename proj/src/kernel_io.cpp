#include "mixlab/kernel_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "mixlab/format.hpp"

namespace mixlab {

Kernel read_kernel_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidChain(std::string("kernel JSON: parse error: ") + e.what());
  }
  if (!j.is_object()) throw InvalidChain("kernel JSON: top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "n_states" && key != "triplets" && key != "state_labels") {
      throw InvalidChain("kernel JSON: unknown key '" + key + "'");
    }
  }
  if (!j.contains("n_states") || !j["n_states"].is_number_unsigned() || j["n_states"].get<std::size_t>() == 0) {
    throw InvalidChain("kernel JSON: n_states must be a positive integer");
  }
  if (!j.contains("triplets") || !j["triplets"].is_array()) {
    throw InvalidChain("kernel JSON: triplets must be an array");
  }
  const auto n = j["n_states"].get<std::size_t>();
  std::vector<Triplet> t;
  for (const auto& e : j["triplets"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned() ||
        !e[2].is_number()) {
      throw InvalidChain("kernel JSON: each triplet must be [row, col, prob]");
    }
    t.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
  }
  std::vector<std::string> labels;
  if (j.contains("state_labels")) {
    if (!j["state_labels"].is_array()) throw InvalidChain("kernel JSON: state_labels must be an array");
    for (const auto& l : j["state_labels"]) {
      if (!l.is_string()) throw InvalidChain("kernel JSON: state_labels entries must be strings");
      labels.push_back(l.get<std::string>());
    }
  }
  return Kernel::from_triplets(n, t, std::move(labels));
}

Kernel read_kernel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidChain("kernel JSON: cannot open " + path);
  return read_kernel_json(in);
}

void write_kernel_json(std::ostream& os, const Kernel& k) {
  // Hand-written so that every probability keeps 17 significant digits.
  os << "{\n  \"n_states\": " << k.size() << ",\n  \"triplets\": [";
  const auto t = k.triplets();
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << (i ? ",\n    " : "\n    ") << '[' << t[i].row << ", " << t[i].col << ", "
       << format_double(t[i].prob) << ']';
  }
  os << "\n  ]";
  if (!k.labels().empty()) {
    os << ",\n  \"state_labels\": [";
    for (std::size_t i = 0; i < k.labels().size(); ++i) {
      os << (i ? ", " : "") << nlohmann::json(k.labels()[i]).dump();
    }
    os << ']';
  }
  os << "\n}\n";
}

}  // namespace mixlab
