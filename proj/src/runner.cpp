#include "cofrag/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cofrag/solver.hpp"

namespace cofrag {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + p.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::string comment_header(const Config& cfg) {
  std::istringstream in(serialize_config(cfg));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) out << "# " << line << "\n";
  return out.str();
}

std::string report_csv(const BoundReport& rep) {
  std::ostringstream out;
  out << "name,worst_margin,pass\n";
  for (const auto& c : rep.checks)
    out << c.name << "," << fmt(c.worst_margin) << "," << (c.pass ? 1 : 0)
        << "\n";
  return out.str();
}

std::string report_txt(const BoundReport& rep, const RunResult* res) {
  std::ostringstream out;
  out << "envelope checks\n";
  for (const auto& c : rep.checks) {
    out << "  " << c.name << ": " << (c.pass ? "pass" : "FAIL")
        << "  worst margin " << fmt(c.worst_margin) << "\n";
  }
  if (res) {
    out << "mass drift " << fmt(res->mass_drift) << "\n";
    out << "subgrid " << (res->subgrid_ok ? "ok" : "OVER THRESHOLD") << "\n";
    out << "steps " << res->steps << "\n";
  }
  return out.str();
}

/// Hypothesis gate shared by run/two-run/study. Returns true to proceed.
bool gate(const Config& cfg, const CommandOptions& opt) {
  if (opt.force) return true;
  KernelSpec spec = make_kernel_spec(cfg);
  CertificationReport cert = verify_hypotheses(spec, 1.0, 20000);
  if (cert.all_core()) return true;
  std::cerr << "hypothesis gate failed:"
            << (cert.linear_growth.holds ? "" : " linear_growth")
            << (cert.small_size_ratio.holds ? "" : " small_size_ratio")
            << (cert.frag_small_size.holds ? "" : " frag_small_size")
            << "  (use --force to run anyway)\n";
  return false;
}

struct StudyLeg {
  double j = 0.0;
  int resolution = 0;
  double M_m0 = 0.0, M_1 = 0.0, M_2 = 0.0;
  double worst_margin = 0.0;
  bool pass = false;
};

StudyLeg run_leg(Config cfg, double j, int resolution,
                 const std::filesystem::path& dir) {
  cfg.j = j;
  cfg.cells_per_decade = resolution;
  cfg.j_list.clear();
  cfg.resolution_list.clear();
  RunResult res = run(make_scenario(cfg));
  BoundReport rep = make_bound_report(cfg, res);
  std::filesystem::create_directories(dir);
  write_file(dir / "moments.csv", moments_csv(cfg, res.series));
  write_file(dir / "report.csv", report_csv(rep));
  write_file(dir / "report.txt", report_txt(rep, &res));
  StudyLeg leg;
  leg.j = j;
  leg.resolution = resolution;
  const MomentSeries& s = res.series;
  leg.M_m0 = s.M_m0.back();
  leg.M_1 = s.M_1.back();
  leg.M_2 = s.M_2.back();
  leg.worst_margin = 1.0;
  leg.pass = rep.all_pass() && res.subgrid_ok && res.mass_drift <= 1e-10;
  for (const auto& c : rep.checks)
    leg.worst_margin = std::min(leg.worst_margin, c.worst_margin);
  return leg;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("COFRAG_WORKERS")) {
    long n = std::atol(env);
    if (n >= 1) return static_cast<std::size_t>(n);
  }
  return 1;
}

std::string leg_dir_name(double j, int resolution) {
  std::ostringstream out;
  out << "j" << fmt(j) << "_r" << resolution;
  return out.str();
}

}  // namespace

std::string moments_csv(const Config& cfg, const MomentSeries& s) {
  const bool with_M0 = cfg.frag == "zero";
  std::ostringstream out;
  out << comment_header(cfg);
  out << "t,M_m0";
  if (with_M0) out << ",M_0";
  out << ",M_1,M_2,M_2pd,W_functional,P_m0,P_mid,subgrid_fraction\n";
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    out << fmt(s.times[i]) << "," << fmt(s.M_m0[i]);
    if (with_M0) out << "," << fmt(s.M_0[i]);
    out << "," << fmt(s.M_1[i]) << "," << fmt(s.M_2[i]) << ","
        << fmt(s.M_2pd[i]) << "," << fmt(s.W_fn[i]) << "," << fmt(s.P_m0[i])
        << "," << fmt(s.P_mid[i]) << "," << fmt(s.subgrid_frac[i]) << "\n";
  }
  return out.str();
}

BoundReport make_bound_report(const Config& cfg, const RunResult& res) {
  KernelSpec spec = make_kernel_spec(cfg);
  const MomentSeries& s = res.series;
  BoundReport rep;
  if (cfg.check_weight_tail)
    rep.checks.push_back(check_weight_tail_envelope(s, spec, res.rho));
  if (cfg.check_frag_flux)
    rep.checks.push_back(
        check_frag_flux_integral(s, spec, res.rho, (cfg.m0 + 1.0) / 2.0));
  if (cfg.check_small_size)
    rep.checks.push_back(check_small_size_moment(s, spec));
  if (cfg.check_higher_moment)
    rep.checks.push_back(check_higher_moment(s, spec, res.rho, 2.0));
  return rep;
}

int run_command(const Config& cfg, const CommandOptions& opt) {
  if (!gate(cfg, opt)) return 2;
  if (opt.dry_run) {
    std::cout << serialize_config(cfg);
    return 0;
  }
  RunResult res = run(make_scenario(cfg));
  BoundReport rep = make_bound_report(cfg, res);
  std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "moments.csv", moments_csv(cfg, res.series));
  write_file(dir / "report.csv", report_csv(rep));
  write_file(dir / "report.txt", report_txt(rep, &res));
  std::cout << report_txt(rep, &res);
  bool ok = rep.all_pass() && res.subgrid_ok && res.mass_drift <= 1e-10;
  return ok ? 0 : 1;
}

int two_run_command(const Config& cfg, const CommandOptions& opt) {
  if (!gate(cfg, opt)) return 2;
  KernelSpec spec = make_kernel_spec(cfg);
  KappaResult kr;
  try {
    kr = compute_kappa(spec, cfg.delta);
  } catch (const std::invalid_argument& e) {
    std::cerr << "two-run: " << e.what() << "\n";
    return 2;
  }
  if (opt.dry_run) {
    std::cout << serialize_config(cfg);
    std::cout << "kappa = " << fmt(kr.kappa) << " (" << kr.attained_by
              << ")\n";
    return 0;
  }
  TwoRunResult tr = two_run_distance(make_scenario(cfg), cfg.epsilon);
  BoundReport rep;
  rep.checks.push_back(check_stability_envelope(tr.times, tr.distance,
                                                tr.series1, tr.series2,
                                                kr.kappa));
  std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  csv << comment_header(cfg);
  csv << "t,distance,envelope\n";
  const CheckResult& c = rep.checks.front();
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    csv << fmt(tr.times[i]) << "," << fmt(tr.distance[i]) << ","
        << fmt(c.envelope[i]) << "\n";
  write_file(dir / "distance.csv", csv.str());
  write_file(dir / "report.csv", report_csv(rep));
  std::ostringstream txt;
  txt << report_txt(rep, nullptr);
  txt << "kappa " << fmt(kr.kappa) << " attained by " << kr.attained_by
      << "\n";
  txt << "initial distance " << fmt(tr.initial_distance) << "\n";
  write_file(dir / "report.txt", txt.str());
  std::cout << txt.str();
  return rep.all_pass() ? 0 : 1;
}

int study_command(const Config& cfg, const CommandOptions& opt) {
  std::vector<double> js = cfg.j_list;
  std::vector<int> res_list = cfg.resolution_list;
  if (js.size() == 1 || res_list.size() == 1) {
    std::cerr << "study: a sweep list needs at least 3 values\n";
    return 2;
  }
  if (js.empty() && res_list.empty()) {
    std::cerr << "study: provide j_list or resolution_list (>= 3 values)\n";
    return 2;
  }
  if (!js.empty() && js.size() < 3) {
    std::cerr << "study: j_list needs at least 3 values\n";
    return 2;
  }
  if (!res_list.empty() && res_list.size() < 3) {
    std::cerr << "study: resolution_list needs at least 3 values\n";
    return 2;
  }
  if (!gate(cfg, opt)) return 2;
  if (js.empty()) js = {cfg.j};
  if (res_list.empty()) res_list = {cfg.cells_per_decade};
  std::sort(js.begin(), js.end());
  std::sort(res_list.begin(), res_list.end());

  if (opt.dry_run) {
    std::cout << serialize_config(cfg);
    std::cout << "legs: " << js.size() * res_list.size() << "\n";
    return 0;
  }

  std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);
  struct Job {
    double j;
    int resolution;
  };
  std::vector<Job> jobs;
  for (double j : js)
    for (int r : res_list) jobs.push_back({j, r});

  std::vector<StudyLeg> legs(jobs.size());
  const std::size_t workers = worker_count();
  std::size_t next = 0;
  while (next < jobs.size()) {
    std::size_t batch = std::min(workers, jobs.size() - next);
    std::vector<std::future<StudyLeg>> fut;
    for (std::size_t k = 0; k < batch; ++k) {
      const Job& job = jobs[next + k];
      fut.push_back(std::async(
          batch > 1 ? std::launch::async : std::launch::deferred,
          [&cfg, job, &dir] {
            return run_leg(cfg, job.j, job.resolution,
                           dir / leg_dir_name(job.j, job.resolution));
          }));
    }
    for (std::size_t k = 0; k < batch; ++k) legs[next + k] = fut[k].get();
    next += batch;
  }

  std::ostringstream csv;
  csv << comment_header(cfg);
  csv << "j,resolution,M_m0,M_1,M_2,worst_margin,pass\n";
  for (const auto& leg : legs)
    csv << fmt(leg.j) << "," << leg.resolution << "," << fmt(leg.M_m0) << ","
        << fmt(leg.M_1) << "," << fmt(leg.M_2) << "," << fmt(leg.worst_margin)
        << "," << (leg.pass ? 1 : 0) << "\n";

  // Successive differences across j at the finest resolution.
  const int r_ref = res_list.back();
  std::vector<const StudyLeg*> by_j;
  for (const auto& leg : legs)
    if (leg.resolution == r_ref) by_j.push_back(&leg);
  csv << "# truncation differences (resolution " << r_ref << ")\n";
  for (std::size_t i = 0; i + 1 < by_j.size(); ++i) {
    csv << "# j " << fmt(by_j[i]->j) << " -> " << fmt(by_j[i + 1]->j)
        << "  dM_m0 " << fmt(std::abs(by_j[i + 1]->M_m0 - by_j[i]->M_m0))
        << "  dM_1 " << fmt(std::abs(by_j[i + 1]->M_1 - by_j[i]->M_1))
        << "  dM_2 " << fmt(std::abs(by_j[i + 1]->M_2 - by_j[i]->M_2))
        << "\n";
  }
  // Observed spatial order from a resolution triplet at the largest j.
  const double j_ref = js.back();
  std::vector<const StudyLeg*> by_r;
  for (const auto& leg : legs)
    if (leg.j == j_ref) by_r.push_back(&leg);
  if (by_r.size() >= 3) {
    for (std::size_t i = 0; i + 2 < by_r.size(); ++i) {
      double e1 = std::abs(by_r[i]->M_2 - by_r[i + 1]->M_2);
      double e2 = std::abs(by_r[i + 1]->M_2 - by_r[i + 2]->M_2);
      double order = (e1 > 0 && e2 > 0) ? std::log2(e1 / e2) : 0.0;
      csv << "# resolutions " << by_r[i]->resolution << "/"
          << by_r[i + 1]->resolution << "/" << by_r[i + 2]->resolution
          << "  observed M_2 order " << fmt(order) << "\n";
    }
  }
  write_file(dir / "study.csv", csv.str());
  std::cout << csv.str();
  bool ok = std::all_of(legs.begin(), legs.end(),
                        [](const StudyLeg& l) { return l.pass; });
  return ok ? 0 : 1;
}

int check_kernel_command(const Config& cfg, const CommandOptions& opt) {
  (void)opt;
  KernelSpec spec = make_kernel_spec(cfg);
  CertificationReport cert = verify_hypotheses(spec, 1.0, 20000);
  auto show = [](const char* name, const HypothesisVerdict& v) {
    std::cout << "  " << name << ": " << (v.holds ? "holds" : "FAILS")
              << (v.exact ? " (exact)" : " (sampled)");
    if (v.holds) std::cout << "  constant " << fmt(v.constant);
    std::cout << "\n";
  };
  std::cout << "hypothesis certification (R = " << fmt(cert.R) << ")\n";
  show("linear_growth", cert.linear_growth);
  show("small_size_ratio", cert.small_size_ratio);
  show("frag_small_size", cert.frag_small_size);
  show("mixed_regime", cert.mixed_regime);
  if (cfg.kernel == "power_law_sum" && cfg.frag == "power_law") {
    Interval iv = admissible_m0_interval(cfg.alpha, cfg.beta, cfg.gamma,
                                         cfg.nu);
    if (iv.empty)
      std::cout << "admissible m0 interval: empty\n";
    else
      std::cout << "admissible m0 interval: (" << fmt(iv.lo) << ", "
                << fmt(iv.hi) << "]\n";
  }
  if (cert.mixed_regime.holds) {
    KappaResult kr = compute_kappa(spec, cfg.delta);
    std::cout << "kappa " << fmt(kr.kappa) << "  attained by "
              << kr.attained_by << "  Y " << fmt(kr.Y) << "\n";
  }
  return cert.all_core() ? 0 : 1;
}

}  // namespace cofrag
