#include "cofrag/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cofrag {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& v, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(v, &pos);
    return pos == v.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "on" || v == "1") {
    out = true;
    return true;
  }
  if (v == "false" || v == "off" || v == "0") {
    out = false;
    return true;
  }
  return false;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Short form for error messages; fmt stays exact for serialization.
std::string show(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& v) {
  std::string s = v;
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (ss >> item) items.push_back(item);
  return items;
}

}  // namespace

ParseOutcome parse_config(const std::string& text) {
  ParseOutcome out;
  Config& c = out.config;
  auto err = [&](const std::string& m) { out.errors.push_back(m); };

  using Setter = std::function<void(const std::string&, int line)>;
  const auto num = [&](double& field) {
    return [&field, &err](const std::string& v, int line) {
      double d;
      if (!parse_double(v, d)) {
        err("line " + std::to_string(line) + ": expected a number, got '" + v +
            "'");
      } else {
        field = d;
      }
    };
  };
  const auto flag = [&](bool& field) {
    return [&field, &err](const std::string& v, int line) {
      bool b;
      if (!parse_bool(v, b)) {
        err("line " + std::to_string(line) + ": expected true/false, got '" +
            v + "'");
      } else {
        field = b;
      }
    };
  };
  const auto word = [&](std::string& field) {
    return [&field](const std::string& v, int) { field = v; };
  };

  std::map<std::string, Setter> setters;
  setters["kernel"] = word(c.kernel);
  setters["alpha"] = num(c.alpha);
  setters["beta"] = num(c.beta);
  setters["c"] = num(c.c);
  setters["frag"] = word(c.frag);
  setters["gamma"] = num(c.gamma);
  setters["nu"] = num(c.nu);
  setters["m0"] = num(c.m0);
  setters["delta"] = num(c.delta);
  setters["x_min"] = num(c.x_min);
  setters["j"] = num(c.j);
  setters["cells_per_decade"] = [&](const std::string& v, int line) {
    double d;
    if (!parse_double(v, d) || d != std::floor(d)) {
      err("line " + std::to_string(line) + ": expected an integer, got '" + v +
          "'");
    } else {
      c.cells_per_decade = static_cast<int>(d);
    }
  };
  setters["ic"] = word(c.ic);
  setters["ic_mass"] = num(c.ic_mass);
  setters["ic_mean"] = num(c.ic_mean);
  setters["ic_size"] = num(c.ic_size);
  setters["ic_p"] = num(c.ic_p);
  setters["ic_xc"] = num(c.ic_xc);
  setters["t_end"] = num(c.t_end);
  setters["outputs"] = [&](const std::string& v, int line) {
    double d;
    if (!parse_double(v, d) || d != std::floor(d) || d < 1.0) {
      err("line " + std::to_string(line) +
          ": expected a positive integer, got '" + v + "'");
    } else {
      c.outputs = static_cast<unsigned long>(d);
    }
  };
  setters["dt_init"] = num(c.dt_init);
  setters["dt_max"] = num(c.dt_max);
  setters["safety"] = num(c.safety);
  setters["positivity_fraction"] = num(c.positivity_fraction);
  setters["check_weight_tail"] = flag(c.check_weight_tail);
  setters["check_frag_flux"] = flag(c.check_frag_flux);
  setters["check_small_size"] = flag(c.check_small_size);
  setters["check_higher_moment"] = flag(c.check_higher_moment);
  setters["subgrid_threshold"] = num(c.subgrid_threshold);
  setters["epsilon"] = num(c.epsilon);
  setters["j_list"] = [&](const std::string& v, int line) {
    c.j_list.clear();
    for (const auto& item : split_list(v)) {
      double d;
      if (!parse_double(item, d)) {
        err("line " + std::to_string(line) + ": bad list entry '" + item + "'");
      } else {
        c.j_list.push_back(d);
      }
    }
  };
  setters["resolution_list"] = [&](const std::string& v, int line) {
    c.resolution_list.clear();
    for (const auto& item : split_list(v)) {
      double d;
      if (!parse_double(item, d) || d != std::floor(d)) {
        err("line " + std::to_string(line) + ": bad list entry '" + item + "'");
      } else {
        c.resolution_list.push_back(static_cast<int>(d));
      }
    }
  };

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      err("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      err("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      continue;
    }
    it->second(value, lineno);
  }

  // Cross-field constraints, reported together with syntax problems.
  if (!(c.nu > -2.0 && c.nu <= -1.0)) {
    err("nu = " + show(c.nu) + " outside the admissible range (-2,-1]");
  } else if (!(c.m0 > -1.0 - c.nu && c.m0 < 1.0)) {
    err("m0 = " + show(c.m0) + " outside the admissible range (" +
        show(-1.0 - c.nu) + ",1)");
  }
  if (!(c.delta > 0.0 && c.delta < 1.0)) {
    err("delta must lie in (0,1)");
  }
  if (c.kernel != "power_law_sum" && c.kernel != "constant" &&
      c.kernel != "additive") {
    err("unknown kernel form '" + c.kernel + "'");
  }
  if (c.kernel == "power_law_sum" && !(c.alpha <= c.beta)) {
    err("require alpha <= beta");
  }
  if (c.frag != "power_law" && c.frag != "zero") {
    err("unknown fragmentation form '" + c.frag + "'");
  }
  if (!(c.x_min > 0.0 && c.x_min < c.j)) {
    err("require 0 < x_min < j");
  }
  if (c.cells_per_decade < 4) err("require cells_per_decade >= 4");
  if (c.ic != "monodisperse" && c.ic != "exponential" &&
      c.ic != "power_cutoff") {
    err("unknown initial condition '" + c.ic + "'");
  }
  if (!(c.ic_mass >= 0.0)) err("ic_mass must be nonnegative");
  if (c.ic == "exponential" && !(c.ic_mean > 0.0)) {
    err("ic_mean must be positive");
  }
  if (!(c.t_end > 0.0)) err("t_end must be positive");
  if (!(c.dt_max > 0.0 && c.dt_init > 0.0)) err("time steps must be positive");
  if (!(c.safety > 0.0 && c.safety < 1.0)) err("safety must lie in (0,1)");
  if (!(c.positivity_fraction > 0.0 && c.positivity_fraction < 1.0)) {
    err("positivity_fraction must lie in (0,1)");
  }
  if (!(c.subgrid_threshold > 0.0)) err("subgrid_threshold must be positive");
  if (!(c.epsilon > -1.0)) err("epsilon must keep the perturbed data nonnegative");

  return out;
}

Config parse_config_or_throw(const std::string& text) {
  ParseOutcome out = parse_config(text);
  if (!out.ok()) {
    std::string all = "invalid config:";
    for (const auto& e : out.errors) all += "\n  " + e;
    throw std::invalid_argument(all);
  }
  return out.config;
}

std::string serialize_config(const Config& c) {
  std::ostringstream os;
  os << "kernel = " << c.kernel << "\n";
  os << "alpha = " << fmt(c.alpha) << "\n";
  os << "beta = " << fmt(c.beta) << "\n";
  os << "c = " << fmt(c.c) << "\n";
  os << "frag = " << c.frag << "\n";
  os << "gamma = " << fmt(c.gamma) << "\n";
  os << "nu = " << fmt(c.nu) << "\n";
  os << "m0 = " << fmt(c.m0) << "\n";
  os << "delta = " << fmt(c.delta) << "\n";
  os << "x_min = " << fmt(c.x_min) << "\n";
  os << "j = " << fmt(c.j) << "\n";
  os << "cells_per_decade = " << c.cells_per_decade << "\n";
  os << "ic = " << c.ic << "\n";
  os << "ic_mass = " << fmt(c.ic_mass) << "\n";
  os << "ic_mean = " << fmt(c.ic_mean) << "\n";
  os << "ic_size = " << fmt(c.ic_size) << "\n";
  os << "ic_p = " << fmt(c.ic_p) << "\n";
  os << "ic_xc = " << fmt(c.ic_xc) << "\n";
  os << "t_end = " << fmt(c.t_end) << "\n";
  os << "outputs = " << c.outputs << "\n";
  os << "dt_init = " << fmt(c.dt_init) << "\n";
  os << "dt_max = " << fmt(c.dt_max) << "\n";
  os << "safety = " << fmt(c.safety) << "\n";
  os << "positivity_fraction = " << fmt(c.positivity_fraction) << "\n";
  os << "check_weight_tail = " << (c.check_weight_tail ? "true" : "false")
     << "\n";
  os << "check_frag_flux = " << (c.check_frag_flux ? "true" : "false") << "\n";
  os << "check_small_size = " << (c.check_small_size ? "true" : "false")
     << "\n";
  os << "check_higher_moment = " << (c.check_higher_moment ? "true" : "false")
     << "\n";
  os << "subgrid_threshold = " << fmt(c.subgrid_threshold) << "\n";
  os << "epsilon = " << fmt(c.epsilon) << "\n";
  if (!c.j_list.empty()) {
    os << "j_list = ";
    for (std::size_t i = 0; i < c.j_list.size(); ++i) {
      os << (i ? "," : "") << fmt(c.j_list[i]);
    }
    os << "\n";
  }
  if (!c.resolution_list.empty()) {
    os << "resolution_list = ";
    for (std::size_t i = 0; i < c.resolution_list.size(); ++i) {
      os << (i ? "," : "") << c.resolution_list[i];
    }
    os << "\n";
  }
  return os.str();
}

KernelSpec make_kernel_spec(const Config& c) {
  CoagKernelSpec coag;
  if (c.kernel == "power_law_sum") {
    coag = CoagKernelSpec::PowerLawSum(c.alpha, c.beta);
  } else if (c.kernel == "constant") {
    coag = CoagKernelSpec::Constant(c.c);
  } else if (c.kernel == "additive") {
    coag = CoagKernelSpec::Additive();
  } else {
    throw std::invalid_argument("unknown kernel form");
  }
  FragRateSpec frag = (c.frag == "power_law") ? FragRateSpec::PowerLaw(c.gamma)
                                              : FragRateSpec::Zero();
  return KernelSpec(coag, frag, DaughterDist(c.nu), c.m0);
}

Scenario make_scenario(const Config& c) {
  Scenario s{make_kernel_spec(c)};
  s.grid.x_min = c.x_min;
  s.grid.j = c.j;
  s.grid.cells_per_decade = c.cells_per_decade;
  if (c.ic == "monodisperse") {
    s.ic.kind = InitialKind::monodisperse;
  } else if (c.ic == "exponential") {
    s.ic.kind = InitialKind::exponential;
  } else {
    s.ic.kind = InitialKind::power_cutoff;
  }
  s.ic.mass = c.ic_mass;
  s.ic.mean = c.ic_mean;
  s.ic.size = c.ic_size;
  s.ic.p = c.ic_p;
  s.ic.x_c = c.ic_xc;
  s.t_end = c.t_end;
  s.outputs = c.outputs;
  s.delta = c.delta;
  s.control.dt_init = c.dt_init;
  s.control.dt_max = c.dt_max;
  s.control.safety = c.safety;
  s.control.positivity_fraction = c.positivity_fraction;
  s.subgrid_fail_fraction = c.subgrid_threshold;
  return s;
}

}  // namespace cofrag
