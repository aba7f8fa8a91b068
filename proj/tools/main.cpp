#include <CLI11.hpp>

#include "atkin.hpp"
#include "cartier.hpp"
#include "exact.hpp"
#include "fiber.hpp"
#include "ordinary.hpp"
#include "relations.hpp"
#include "report.hpp"
#include "ssenum.hpp"
#include "tower.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

using namespace charp;

namespace {

std::mt19937 job_rng(uint64_t seed, uint64_t suite, uint64_t job) {
  std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(suite), uint32_t(job)};
  return std::mt19937(seq);
}

CurveModel build_curve(const CurveSpec& cs) {
  Fq K = cs.field_degree > 1 ? Fq::extension_field(cs.p, cs.field_degree)
                             : Fq::prime_field(cs.p);
  if (cs.kind == "projective-line") return CurveModel::projective_line(K);
  if (cs.kind == "elliptic") {
    if (cs.a_coeffs.size() != 3) throw std::invalid_argument("elliptic needs {a2,a4,a6}");
    return CurveModel::elliptic(K, K.from_int(cs.a_coeffs[0]), K.from_int(cs.a_coeffs[1]),
                                K.from_int(cs.a_coeffs[2]));
  }
  if (cs.kind == "artin-schreier") {
    RatOps R(K);
    RatF f = R.zero();
    for (int64_t pole : cs.poles)
      f = R.add(f, R.make({K.one()}, {K.neg(K.from_int(pole)), K.one()}));
    if (!cs.poly.empty()) {
      FqPoly q;
      for (int64_t cc : cs.poly) q.push_back(K.from_int(cc));
      f = R.add(f, R.from_poly(q));
    }
    return CurveModel::artin_schreier(K, f);
  }
  throw std::invalid_argument("unknown curve kind: " + cs.kind);
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

SuiteResult suite_verify_identity(const RunConfig& cfg, int jobs) {
  SuiteResult out;
  out.name = "verify-identity";
  std::vector<Json> rows(cfg.pairs.size());
  std::vector<bool> oks(cfg.pairs.size(), false);
  run_jobs(jobs, int(cfg.pairs.size()), [&](int i) {
    auto [p, N] = cfg.pairs[size_t(i)];
    auto t = verify_d_identity(p, N);
    auto ss = supersingular_count(p, N);
    Json row;
    row["p"] = p;
    row["N"] = N;
    row["gamma"] = t.gamma;
    row["delta"] = t.delta;
    row["d"] = t.d;
    row["d_k"] = t.d_k;
    row["sum_dk"] = t.sum_dk;
    row["gamma_matches_d2"] = t.gamma_matches_d2;
    row["mass_formula_ok"] = ss.mass_formula_ok;
    row["delta_dual_path_ok"] = ss.dual_path_ok;
    row["identity_as_stated"] = t.identity_holds;   // gamma + delta - 1 = sum d_k
    row["identity_top_weight"] = t.identity_top;    // gamma + delta - 1 = d_{p+1}
    rows[size_t(i)] = std::move(row);
    // the suite verdict tracks the independently checkable invariants; the
    // as-stated identity outcome is reported as data either way
    oks[size_t(i)] = t.gamma_matches_d2 && ss.mass_formula_ok && ss.dual_path_ok && t.identity_top;
  });
  bool all = true;
  Json arr = Json::array();
  for (size_t i = 0; i < rows.size(); i++) {
    arr.push_back(rows[i]);
    all = all && oks[i];
  }
  out.detail["tables"] = arr;
  out.ok = all;
  return out;
}

SuiteResult suite_cartier(const RunConfig& cfg, int jobs) {
  SuiteResult out;
  out.name = "cartier";
  std::vector<Json> rows(cfg.curves.size());
  std::vector<bool> oks(cfg.curves.size(), false);
  run_jobs(jobs, int(cfg.curves.size()), [&](int i) {
    const CurveSpec& cs = cfg.curves[size_t(i)];
    auto rng = job_rng(cfg.seed, 2, uint64_t(i));
    CurveModel c = build_curve(cs);
    const Fq& K = c.field();
    Json row;
    row["p"] = cs.p;
    row["kind"] = cs.kind;
    bool ok = true;
    // Hasse-Witt invariant
    auto hw = hasse_witt(c);
    row["genus"] = c.genus();
    row["gamma"] = hw.gamma;
    if (c.kind() == CurveKind::ArtinSchreier) {
      auto nk = nakajima_check(c);
      row["nakajima"] = {{"free", nk.free},
                        {"rank", nk.rank},
                        {"expected_rank", nk.expected_rank},
                        {"ordinary_dim", nk.ordinary_dim},
                        {"independent_of_n", nk.independent_of_n},
                        {"gamma_cover", nk.gamma_cover}};
      ok = ok && nk.free && nk.rank == nk.expected_rank && nk.independent_of_n &&
           nk.ordinary_dim == nk.rank * cs.p;
      int64_t s = int64_t(c.branch_points().size());
      ok = ok && nk.gamma_cover == (s - 1) * (cs.p - 1);
    }
    // randomized residue identity res(V eta)^p = res(eta) at marked places
    {
      int checked = 0, trials = 0;
      PolyOps<Fq> P(K);
      // marked places: split fibers discovered on the curve
      std::vector<Place> marked;
      for (int64_t x = 0; x < K.card() && marked.size() < 4; x++) {
        XPoint xp = XPoint::finite(K.unrank(x));
        if (c.kind() == CurveKind::ArtinSchreier && c.ramified_over(xp)) continue;
        for (const auto& pl : c.fiber(xp)) {
          if (c.kind() == CurveKind::Elliptic && pl.ramified) continue;
          marked.push_back(pl);
          break;
        }
      }
      FqPoly den = P.mul(FqPoly{K.neg(K.one()), K.one()}, FqPoly{K.zero(), K.one()});
      while (checked < 25 && trials < 200) {
        trials++;
        CurveFunc g = c.zero_fn();
        for (int j = 0; j < c.ydeg(); j++) {
          FqPoly num(4, K.zero());
          for (auto& v : num) v = K.from_int(int64_t(rng() % K.pm()));
          g.comp[size_t(j)] = c.rat().make(num, den);
        }
        if (c.fn_is_zero(g)) continue;
        MeroDiff w{g};
        MeroDiff vw = cartier_apply(c, w);
        for (const auto& pl : marked) {
          FqElem lhs = K.pow(residue_at(c, vw, pl), K.p());
          FqElem rhs = residue_at(c, w, pl);
          if (!(lhs == rhs)) ok = false;
          // local formula agreement
          LSeries sw = c.expand_diff(w, pl, 6);
          LSeries sv = c.expand_diff(vw, pl, 2);
          LSeries oracle = cartier_local(sw);
          for (int e = std::min(sv.lowest, oracle.lowest);
               e < std::min(sv.prec, oracle.prec); e++)
            if (!(sv.coeff(e) == oracle.coeff(e))) ok = false;
        }
        checked++;
      }
      row["residual_checks"] = checked;
    }
    row["ok"] = ok;
    rows[size_t(i)] = std::move(row);
    oks[size_t(i)] = ok;
  });
  bool all = true;
  Json arr = Json::array();
  for (size_t i = 0; i < rows.size(); i++) {
    arr.push_back(rows[i]);
    all = all && oks[i];
  }
  out.detail["curves"] = arr;
  out.ok = all;
  return out;
}

TruncatedTower random_free_tower(int64_t p, int r_max, int64_t d, std::mt19937& rng) {
  Fq A = Fq::prime_field(p);
  auto base = TruncatedTower::regular(RingChain::constant(A, r_max), int(d));
  std::vector<Mat<Fq>> conj;
  for (int r = 1; r <= r_max; r++) {
    int n = base.at(r).dim();
    while (true) {
      Mat<Fq> c(A, n, n);
      for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++) c.at(i, j) = A.from_int(int64_t(rng() % p));
      if (inverse(c)) {
        conj.push_back(c);
        break;
      }
    }
  }
  TruncatedTower t;
  t.chain = base.chain;
  for (int r = 1; r <= r_max; r++) {
    auto cinv = *inverse(conj[size_t(r - 1)]);
    t.levels.push_back(
        GroupRingModule(A, base.at(r).level, conj[size_t(r - 1)].mul(base.at(r).gamma).mul(cinv)));
  }
  for (int r = 2; r <= r_max; r++) {
    auto cinv = *inverse(conj[size_t(r - 1)]);
    t.down.push_back(conj[size_t(r - 2)].mul(base.down[size_t(r - 2)]).mul(cinv));
  }
  return t;
}

SuiteResult suite_tower(const RunConfig& cfg, int jobs) {
  SuiteResult out;
  out.name = "tower";
  std::vector<Json> rows(cfg.towers.size());
  std::vector<bool> oks(cfg.towers.size(), false);
  run_jobs(jobs, int(cfg.towers.size()), [&](int i) {
    const TowerSpec& ts = cfg.towers[size_t(i)];
    auto rng = job_rng(cfg.seed, 3, uint64_t(i));
    Json row;
    row["p"] = ts.p;
    row["r_max"] = ts.r_max;
    row["d"] = ts.d;
    row["synthetic"] = true; // equal base rings at all levels
    bool ok = true;
    int done = 0;
    for (int t = 0; t < ts.count; t++) {
      auto tw = random_free_tower(ts.p, ts.r_max, ts.d, rng);
      auto hyp = check_tower_hypotheses(tw, IdealKind::Zero);
      ok = ok && hyp.all_hold && hyp.d == ts.d;
      if (!hyp.all_hold) continue;
      for (int r = 1; r <= ts.r_max && ok; r++)
        for (int s = 1; s <= r && ok; s++) ok = control_isomorphism(tw, r, s, hyp).holds;
      auto lim = truncated_limit(tw, hyp);
      ok = ok && lim.specialization_verified && int64_t(lim.basis.size()) == ts.d;
      done++;
    }
    // deliberately broken fixture: zeroed top transition must be rejected at
    // the right level
    {
      auto tw = TruncatedTower::regular(RingChain::constant(Fq::prime_field(ts.p), ts.r_max),
                                        int(ts.d));
      if (ts.r_max >= 2) {
        tw.down[size_t(ts.r_max - 2)] =
            Mat<Fq>(Fq::prime_field(ts.p), tw.at(ts.r_max - 1).dim(), tw.at(ts.r_max).dim());
        auto hyp = check_tower_hypotheses(tw, IdealKind::Zero);
        ok = ok && !hyp.all_hold &&
             hyp.failure.find("level " + std::to_string(ts.r_max)) != std::string::npos;
      }
    }
    // lambda pairing on the regular tower of this shape
    {
      auto reg = TruncatedTower::regular(RingChain::constant(Fq::prime_field(ts.p), ts.r_max),
                                         int(ts.d));
      auto pf = trace_pairing_family(reg);
      auto lp = build_lambda_pairing(reg, reg, pf);
      ok = ok && lp.ok();
      // perturbed family must be rejected
      auto bad = pf;
      bad.gram[size_t(ts.r_max - 1)] =
          bad.gram[size_t(ts.r_max - 1)].scale(Fq::prime_field(ts.p).from_int(2));
      auto compat = verify_pairing_compat(bad, reg, reg);
      ok = ok && (ts.r_max < 2 || !compat.ok());
    }
    row["towers_checked"] = done;
    row["ok"] = ok;
    rows[size_t(i)] = std::move(row);
    oks[size_t(i)] = ok;
  });
  bool all = true;
  Json arr = Json::array();
  for (size_t i = 0; i < rows.size(); i++) {
    arr.push_back(rows[i]);
    all = all && oks[i];
  }
  out.detail["towers"] = arr;
  out.ok = all;
  return out;
}

SuiteResult suite_fiber(const RunConfig& cfg, int jobs) {
  SuiteResult out;
  out.name = "fiber";
  std::vector<Json> rows(cfg.carriers.size());
  std::vector<bool> oks(cfg.carriers.size(), false);
  run_jobs(jobs, int(cfg.carriers.size()), [&](int i) {
    const CarrierSpec& cs = cfg.carriers[size_t(i)];
    auto rng = job_rng(cfg.seed, 4, uint64_t(i));
    Json row;
    row["p"] = cs.p;
    row["r"] = cs.r;
    row["d"] = cs.d;
    bool ok = true;
    for (int t = 0; t < cs.count; t++) {
      auto c = IgusaCarrier::synthetic(cs.p, cs.r, cs.d, rng, cs.residues);
      // closed form vs brute iteration
      for (int n = cs.r; n <= std::min(2 * cs.r, cs.r + 3) && ok; n++) {
        MeroSection s = zero_section(c);
        for (auto& v : s.v) v = c.K.from_int(int64_t(rng() % cs.p));
        MeroSection it = s, it2 = s;
        for (int k = 0; k < n; k++) {
          it = up_apply(c, it);
          it2 = upstar_apply(c, it2);
        }
        ok = ok && it.v == up_power_closed_form(c, s, n).v;
        ok = ok && it2.v == upstar_power_closed_form(c, s, n).v;
      }
      auto con = ordinary_contraction_check(c);
      ok = ok && con.ok();
      auto sp = frobenius_splitting_check(c);
      ok = ok && sp.ok() && sp.rank_h0 == cs.d && sp.rank_middle == 2 * cs.d &&
           sp.rank_h1 == cs.d;
      if (cs.residues) {
        std::vector<FqElem> nu(size_t(c.dims[size_t(cs.r)]), c.K.zero());
        for (auto& v : nu) v = c.K.from_int(int64_t(rng() % cs.p));
        ok = ok && residue_sum_check(c, true, nu).ok();
        ok = ok && residue_sum_check(c, false, nu).sums_vanish;
      }
    }
    auto tables = verify_relation_tables(cs.p, cs.r);
    ok = ok && tables.ok();
    row["relation_tables_ok"] = tables.ok();
    row["ok"] = ok;
    rows[size_t(i)] = std::move(row);
    oks[size_t(i)] = ok;
  });
  bool all = true;
  Json arr = Json::array();
  for (size_t i = 0; i < rows.size(); i++) {
    arr.push_back(rows[i]);
    all = all && oks[i];
  }
  // component table for (p=5, r=2)
  Json comp = Json::array();
  for (const auto& ci : list_components(5, 2))
    comp.push_back({{"a", ci.a}, {"b", ci.b}, {"u", ci.u}});
  out.detail["components_p5_r2"] = comp;
  out.detail["carriers"] = arr;
  out.ok = all;
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"charp: exact verification suites for characteristic-p modular structures"};
  std::string config_path, out_path;
  uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  bool timings = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_path, "report output path (default: stdout)");
  auto* seed_opt = app.add_option("--seed", seed, "override the random seed");
  app.add_option("--jobs", jobs, "worker pool size")->default_val(1);
  app.add_flag("--timings", timings, "include wall-clock timings (breaks byte-identity)");

  bool run_identity = false, run_cartier = false, run_tower = false, run_fiber = false;
  app.add_subcommand("verify-identity", "ordinary-rank tables and the d-identity")
      ->callback([&]() { run_identity = true; });
  app.add_subcommand("cartier", "curve suites: Hasse-Witt, Nakajima, residues")
      ->callback([&]() { run_cartier = true; });
  app.add_subcommand("tower", "synthetic tower hypotheses, control, limits, pairings")
      ->callback([&]() { run_tower = true; });
  app.add_subcommand("fiber", "component-model suites")->callback([&]() { run_fiber = true; });
  app.add_subcommand("all", "run every suite")->callback([&]() {
    run_identity = run_cartier = run_tower = run_fiber = true;
  });
  app.fallthrough();
  app.require_subcommand(1);

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  try {
    RunConfig cfg = RunConfig::defaults();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::runtime_error("cannot open config: " + config_path);
      Json j;
      in >> j;
      cfg = RunConfig::from_json(j);
    }
    if (seed_set) cfg.seed = seed;
    cfg.timings = timings;
    if (!out_path.empty()) cfg.out_path = out_path;

    std::vector<SuiteResult> suites;
    std::vector<double> times;
    auto timed = [&](SuiteResult (*fn)(const RunConfig&, int)) {
      auto t0 = std::chrono::steady_clock::now();
      suites.push_back(fn(cfg, jobs));
      auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    };
    if (run_identity) timed(&suite_verify_identity);
    if (run_cartier) timed(&suite_cartier);
    if (run_tower) timed(&suite_tower);
    if (run_fiber) timed(&suite_fiber);

    Json rep = make_report(cfg, suites, times);
    std::string text = rep.dump(2);
    text += "\n";
    if (!cfg.out_path.empty()) {
      std::ofstream o(cfg.out_path);
      o << text;
    } else {
      std::cout << text;
    }
    bool all = true;
    for (const auto& s : suites) all = all && s.ok;
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
