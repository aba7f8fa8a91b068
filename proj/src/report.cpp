#include "report.hpp"

#include <atomic>
#include <functional>
#include <stdexcept>
#include <thread>

namespace charp {

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.pairs = {{5, 7}, {5, 11}, {7, 4}, {7, 5}, {11, 4}, {13, 4}};
  c.r_max = 3;
  for (int64_t p : {3, 5}) {
    // the standard Artin-Schreier family: s = 1, 2, 3 branch points
    for (int s = 1; s <= 3; s++) {
      CurveSpec cs;
      cs.p = p;
      cs.kind = "artin-schreier";
      for (int i = 0; i < s; i++) cs.poles.push_back(i);
      c.curves.push_back(cs);
    }
  }
  {
    CurveSpec e1{5, 1, "elliptic", {0, 1, 1}, {}, {}};
    CurveSpec e2{5, 1, "elliptic", {0, 0, 1}, {}, {}};
    c.curves.push_back(e1);
    c.curves.push_back(e2);
  }
  c.towers = {{3, 3, 2, 4}, {5, 2, 3, 4}, {3, 2, 1, 4}, {5, 3, 1, 2}, {3, 3, 3, 3}, {5, 2, 2, 3}};
  c.carriers = {{3, 1, 2, 2, true}, {3, 2, 2, 2, true}, {3, 3, 1, 2, true}, {5, 2, 2, 2, true}};
  c.seed = 1;
  return c;
}

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig c = defaults();
  if (j.contains("pairs")) {
    c.pairs.clear();
    for (const auto& pr : j.at("pairs"))
      c.pairs.push_back({pr.at(0).get<int64_t>(), pr.at(1).get<int64_t>()});
  }
  if (j.contains("r_max")) c.r_max = j.at("r_max").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
  if (j.contains("curves")) {
    c.curves.clear();
    for (const auto& cv : j.at("curves")) {
      CurveSpec cs;
      cs.p = cv.at("p").get<int64_t>();
      cs.kind = cv.at("kind").get<std::string>();
      if (cv.contains("field_degree")) cs.field_degree = cv.at("field_degree").get<int>();
      if (cv.contains("a_coeffs")) cs.a_coeffs = cv.at("a_coeffs").get<std::vector<int64_t>>();
      if (cv.contains("poles")) cs.poles = cv.at("poles").get<std::vector<int64_t>>();
      if (cv.contains("poly")) cs.poly = cv.at("poly").get<std::vector<int64_t>>();
      c.curves.push_back(std::move(cs));
    }
  }
  if (j.contains("towers")) {
    c.towers.clear();
    for (const auto& tv : j.at("towers"))
      c.towers.push_back({tv.at("p").get<int64_t>(), tv.at("r_max").get<int>(),
                          tv.at("d").get<int64_t>(),
                          tv.contains("count") ? tv.at("count").get<int>() : 1});
  }
  if (j.contains("carriers")) {
    c.carriers.clear();
    for (const auto& cv : j.at("carriers"))
      c.carriers.push_back({cv.at("p").get<int64_t>(), cv.at("r").get<int>(),
                            cv.at("d").get<int64_t>(),
                            cv.contains("count") ? cv.at("count").get<int>() : 1,
                            cv.contains("residues") ? cv.at("residues").get<bool>() : true});
  }
  // constraint validation: p > 2 prime, p not dividing N, Np > 4
  for (auto [p, N] : c.pairs) {
    bool prime = p > 2;
    for (int64_t q = 2; q * q <= p; q++)
      if (p % q == 0) prime = false;
    if (!prime || N < 1 || N % p == 0 || N * p <= 4)
      throw std::invalid_argument("config pair (" + std::to_string(p) + "," + std::to_string(N) +
                                  ") violates p > 2 prime, p not dividing N, Np > 4");
  }
  return c;
}

Json RunConfig::to_json() const {
  Json j;
  Json pr = Json::array();
  for (auto [p, N] : pairs) pr.push_back({p, N});
  j["pairs"] = pr;
  j["r_max"] = r_max;
  j["seed"] = seed;
  Json cv = Json::array();
  for (const auto& cs : curves) {
    Json e;
    e["p"] = cs.p;
    e["kind"] = cs.kind;
    e["field_degree"] = cs.field_degree;
    if (!cs.a_coeffs.empty()) e["a_coeffs"] = cs.a_coeffs;
    if (!cs.poles.empty()) e["poles"] = cs.poles;
    if (!cs.poly.empty()) e["poly"] = cs.poly;
    cv.push_back(e);
  }
  j["curves"] = cv;
  Json tv = Json::array();
  for (const auto& ts : towers)
    tv.push_back({{"p", ts.p}, {"r_max", ts.r_max}, {"d", ts.d}, {"count", ts.count}});
  j["towers"] = tv;
  Json crv = Json::array();
  for (const auto& cs : carriers)
    crv.push_back({{"p", cs.p}, {"r", cs.r}, {"d", cs.d}, {"count", cs.count},
                   {"residues", cs.residues}});
  j["carriers"] = crv;
  return j;
}

Json make_report(const RunConfig& cfg, const std::vector<SuiteResult>& suites,
                 const std::vector<double>& timings_ms) {
  Json rep;
  rep["schema"] = "charp-report/1";
  rep["config"] = cfg.to_json();
  bool all = true;
  Json js = Json::array();
  for (size_t i = 0; i < suites.size(); i++) {
    Json s;
    s["suite"] = suites[i].name;
    s["ok"] = suites[i].ok;
    s["detail"] = suites[i].detail;
    if (cfg.timings && i < timings_ms.size())
      s["timing_ms"] = timings_ms[i];
    else
      s["timing_ms"] = nullptr;
    js.push_back(s);
    all = all && suites[i].ok;
  }
  rep["suites"] = js;
  rep["all_ok"] = all;
  return rep;
}

void run_jobs(int jobs, int count, const std::function<void(int)>& fn) {
  if (jobs <= 1) {
    for (int i = 0; i < count; i++) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; t++)
    pool.emplace_back([&]() {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

} // namespace charp
