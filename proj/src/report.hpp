#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace charp {

using Json = nlohmann::ordered_json;

// Run configuration for the verification suites.  Reports are deterministic
// functions of (config, seed); wall-clock timing is filled only on request.
struct CurveSpec {
  int64_t p = 3;
  int field_degree = 1;
  std::string kind;             // "projective-line" | "elliptic" | "artin-schreier"
  std::vector<int64_t> a_coeffs; // elliptic: {a2, a4, a6}
  std::vector<int64_t> poles;    // artin-schreier: f = sum 1/(x - pole_i)
  std::vector<int64_t> poly;     // artin-schreier: + polynomial part (lowest first)
};

struct TowerSpec {
  int64_t p = 3;
  int r_max = 2;
  int64_t d = 1;
  int count = 1; // number of randomized towers of this shape
};

struct CarrierSpec {
  int64_t p = 3;
  int r = 2;
  int64_t d = 1;
  int count = 1;
  bool residues = true;
};

struct RunConfig {
  std::vector<std::pair<int64_t, int64_t>> pairs; // (p, N)
  int r_max = 3;
  std::vector<CurveSpec> curves;
  std::vector<TowerSpec> towers;
  std::vector<CarrierSpec> carriers;
  uint64_t seed = 1;
  std::string out_path;
  bool timings = false;

  static RunConfig defaults();
  static RunConfig from_json(const Json& j);
  Json to_json() const;
};

struct SuiteResult {
  std::string name;
  bool ok = false;
  Json detail;
};

Json make_report(const RunConfig& cfg, const std::vector<SuiteResult>& suites,
                 const std::vector<double>& timings_ms);

// run every job (index-addressed) on a small pool; results keep job order
void run_jobs(int jobs, int count, const std::function<void(int)>& fn);

} // namespace charp
