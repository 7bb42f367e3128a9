#pragma once

#include <json.hpp>
#include <map>
#include <string>

#include "haarlab/counterexample.hpp"
#include "haarlab/padic.hpp"
#include "haarlab/transport.hpp"
#include "haarlab/walks.hpp"

namespace haarlab::io {

using nlohmann::json;

std::string fmt17(double v);  // %.17g, deterministic across runs

// scalars and matrices as {p, K, n, entries: base-10 digit strings}
json padic_scalar_json(const padic::Scalar& s);
padic::Scalar padic_scalar_from_json(const json& j);
json padic_matrix_json(const padic::Matrix& m);
padic::Matrix padic_matrix_from_json(const json& j);

std::string rat_str(const transport::Rat& r);  // exact "num/den"
transport::Rat rat_from_str(const std::string& s);

json decomposition_json(const transport::Decomposition& d);
json coupling_json(const transport::CouplingMatrix& c);
void write_coupling_csv(const std::string& path, const transport::CouplingMatrix& c);

json spectral_json(const walks::SpectralReport& r);
json displacement_json(const walks::DisplacementReport& r);

json decay_json(const cx::DecayReport& r);
// plot-ready CSV: j, max|gamma_j - 1|, bound, |mu_hat(gamma_j)|
void write_decay_csv(const std::string& path, const cx::DecayReport& r);

// one serialized point per row, with a JSON sidecar recording spec and seed
void write_sample_cloud(const std::string& csv_path, const std::string& sidecar_path,
                        const groups::Spec& spec, const std::vector<groups::Point>& pts,
                        std::uint64_t seed);

void write_text(const std::string& path, const std::string& content);

// Flat key = value configuration with [section] headers; '#' comments.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);
  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;  // throws when missing
  std::string get_or(const std::string& section, const std::string& key, const std::string& dflt) const;
  long get_long(const std::string& section, const std::string& key) const;
  long get_long_or(const std::string& section, const std::string& key, long dflt) const;
  double get_double_or(const std::string& section, const std::string& key, double dflt) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
  json dump() const;  // full snapshot for run records

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace haarlab::io
